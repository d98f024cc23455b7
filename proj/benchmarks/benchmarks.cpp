#include <benchmark/benchmark.h>

#include <utility>
#include <vector>

#include "soilspec/cart.hpp"
#include "soilspec/dataset.hpp"
#include "soilspec/forest.hpp"
#include "soilspec/preprocess.hpp"
#include "soilspec/regressor.hpp"
#include "soilspec/rng.hpp"
#include "soilspec/som.hpp"

using namespace soilspec;

namespace {

// One shared synthetic scene; every benchmark slices what it needs.
const Dataset& scene() {
  static const Dataset data = generate_synthetic(SynthConfig{}, 1);
  return data;
}

std::pair<Matrix, std::vector<double>> train_block(std::size_t n) {
  auto [features, targets] = assemble_features(scene());
  Matrix x(n, features.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < features.cols(); ++j) x(i, j) = features(i, j);
  return {std::move(x), std::vector<double>(targets.begin(), targets.begin() + n)};
}

void cart_fit(benchmark::State& state) {
  const auto [x, y] = train_block(static_cast<std::size_t>(state.range(0)));
  TreeParams params;
  for (auto _ : state) {
    Rng rng(1);
    CartTree tree;
    tree.fit(x, y, params, rng);
    benchmark::DoNotOptimize(tree.nodes().size());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(cart_fit)->Arg(128)->Arg(256)->Arg(512)->Complexity();

void extra_trees_fit(benchmark::State& state) {
  const auto [x, y] = train_block(641);
  const auto hp = HyperparameterSet::for_kind(
      "et", {{"n_estimators", static_cast<double>(state.range(0))}});
  for (auto _ : state) {
    ForestRegressor forest("et", hp, 1);
    forest.fit(x, y);
    benchmark::DoNotOptimize(forest.feature_importance().size());
  }
}
BENCHMARK(extra_trees_fit)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void extra_trees_predict(benchmark::State& state) {
  const auto [x, y] = train_block(641);
  ForestRegressor forest("et", HyperparameterSet::for_kind("et", {{"n_estimators", 100.0}}), 1);
  forest.fit(x, y);
  for (auto _ : state) benchmark::DoNotOptimize(forest.predict(x).back());
  state.SetItemsProcessed(state.iterations() * static_cast<long>(x.rows()));
}
BENCHMARK(extra_trees_predict)->Unit(benchmark::kMillisecond);

void knn_predict(benchmark::State& state) {
  const auto [x, y] = train_block(641);
  auto knn = make_regressor("knn", 0);
  knn->fit(x, y);
  for (auto _ : state) benchmark::DoNotOptimize(knn->predict(x).back());
  state.SetItemsProcessed(state.iterations() * static_cast<long>(x.rows()));
}
BENCHMARK(knn_predict)->Unit(benchmark::kMillisecond);

void pca_fit_transform(benchmark::State& state) {
  const auto [x, y] = train_block(641);
  for (auto _ : state) {
    const PcaModel pca = pca_fit(x, 20);
    benchmark::DoNotOptimize(pca_transform(pca, x).rows());
  }
}
BENCHMARK(pca_fit_transform)->Unit(benchmark::kMillisecond);

void som_input_sweep(benchmark::State& state) {
  const auto [x, y] = train_block(641);
  const MinMaxScaler scaler = minmax_fit(x, y);
  const Matrix xs = minmax_transform_features(scaler, x);
  SomSchedule schedule;
  schedule.n_iter_input = state.range(0);
  schedule.radius_start = 5.0;
  for (auto _ : state) {
    Rng rng(1);
    SomGrid grid = init_som_grid(10, 10, xs, rng);
    fit_input_som(grid, xs, schedule, rng);
    benchmark::DoNotOptimize(grid.weights.data().back());
  }
}
BENCHMARK(som_input_sweep)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
