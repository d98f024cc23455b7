#include <algorithm>
#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "soilspec/error.hpp"
#include "soilspec/rng.hpp"
#include "soilspec/som.hpp"
#include "support/oracles.hpp"

using namespace soilspec;

namespace {

// Two well-separated blobs; y labels the blob.
struct Blobs {
  Matrix x;
  std::vector<double> y;
};

Blobs make_blobs(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Blobs b{Matrix(n, 2), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const bool second = i % 2 == 1;
    b.x(i, 0) = (second ? 8.0 : 0.0) + 0.5 * rng.normal();
    b.x(i, 1) = (second ? -3.0 : 3.0) + 0.5 * rng.normal();
    b.y[i] = second ? 10.0 : 0.0;
  }
  return b;
}

}  // namespace

TEST_CASE("som schedule: exponential decay hits both endpoints") {
  const double a0 = 0.4, a1 = 0.005;
  CHECK(schedule_value(a0, a1, 0, 100) == a0);
  CHECK(std::abs(schedule_value(a0, a1, 100, 100) - a1) <= 1e-12);
  CHECK(schedule_value(a0, a1, 50, 100) == doctest::Approx(std::sqrt(a0 * a1)));

  // Strictly decreasing between the endpoints when start > end.
  double prev = schedule_value(35.0, 1.0, 0, 10);
  for (long t = 1; t <= 10; ++t) {
    const double cur = schedule_value(35.0, 1.0, t, 10);
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK(std::abs(prev - 1.0) <= 1e-12);

  CHECK(schedule_value(0.2, 0.2, 7, 9) == 0.2);
  CHECK(schedule_value(0.0, 0.5, 3, 10) == 0.0);

  CHECK_THROWS_AS(schedule_value(0.4, 0.005, 0, 0), Error);
  CHECK_THROWS_AS(schedule_value(0.4, 0.005, -1, 10), Error);
  CHECK_THROWS_AS(schedule_value(0.4, 0.005, 11, 10), Error);
}

TEST_CASE("som neighborhood: gaussian falloff in grid distance") {
  CHECK(neighborhood_weight(0.0, 2.0) == 1.0);
  CHECK(neighborhood_weight(2.0, 2.0) == doctest::Approx(std::exp(-0.5)));
  CHECK(neighborhood_weight(4.0, 2.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(neighborhood_weight(1.0, 0.5) < neighborhood_weight(1.0, 5.0));
  CHECK_THROWS_AS(neighborhood_weight(1.0, 0.0), Error);
  CHECK_THROWS_AS(neighborhood_weight(-1.0, 1.0), Error);
}

TEST_CASE("som bmu: matches the exhaustive oracle and breaks ties low") {
  Rng rng(500);
  SomGrid grid{4, 5, Matrix(20, 3)};
  for (auto& v : grid.weights.data()) v = rng.uniform(-1.0, 1.0);

  for (int q = 0; q < 25; ++q) {
    double query[3] = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const auto got = find_bmu(grid, query, 3);
    const auto want = oracles::find_bmu(grid.weights, 4, 5, query, 3);
    CHECK(got == want);
  }

  // Duplicate two neurons and query their shared weight vector; the earlier
  // one in row-major order must win.
  for (std::size_t j = 0; j < 3; ++j) grid.weights(2 * 5 + 3, j) = grid.weights(1 * 5 + 2, j);
  const auto tie = find_bmu(grid, grid.weights.row(1 * 5 + 2), 3);
  CHECK(tie.first == 1);
  CHECK(tie.second == 2);

  CHECK_THROWS_AS(find_bmu(grid, grid.weights.row(0), 2), Error);
}

TEST_CASE("som init: neuron weights land inside the per-feature data range") {
  Rng data_rng(510);
  Matrix x(30, 3);
  for (std::size_t i = 0; i < 30; ++i) {
    x(i, 0) = data_rng.uniform(-2.0, 5.0);
    x(i, 1) = data_rng.uniform(10.0, 11.0);
    x(i, 2) = 42.0;  // constant
  }
  Rng rng_a(7), rng_b(7);
  const SomGrid a = init_som_grid(3, 4, x, rng_a);
  const SomGrid b = init_som_grid(3, 4, x, rng_b);
  CHECK(a.weights.data() == b.weights.data());

  double lo0 = x(0, 0), hi0 = lo0, lo1 = x(0, 1), hi1 = lo1;
  for (std::size_t i = 1; i < 30; ++i) {
    lo0 = std::min(lo0, x(i, 0));
    hi0 = std::max(hi0, x(i, 0));
    lo1 = std::min(lo1, x(i, 1));
    hi1 = std::max(hi1, x(i, 1));
  }
  for (std::size_t m = 0; m < a.neuron_count(); ++m) {
    CHECK(a.weights(m, 0) >= lo0);
    CHECK(a.weights(m, 0) <= hi0);
    CHECK(a.weights(m, 1) >= lo1);
    CHECK(a.weights(m, 1) <= hi1);
    CHECK(a.weights(m, 2) == 42.0);
  }

  Rng rng_c(7);
  CHECK_THROWS_AS(init_som_grid(0, 4, x, rng_c), Error);
  CHECK_THROWS_AS(init_som_grid(3, 4, Matrix(0, 3), rng_c), Error);
}

TEST_CASE("som training: input stage reduces quantization error") {
  const Blobs data = make_blobs(60, 520);
  Rng rng(9);
  SomGrid grid = init_som_grid(3, 4, data.x, rng);
  const double before = quantization_error(grid, data.x);

  SomSchedule schedule;
  schedule.n_iter_input = 600;
  schedule.radius_start = 2.0;
  fit_input_som(grid, data.x, schedule, rng);
  const double after = quantization_error(grid, data.x);
  CHECK(after < before);
}

TEST_CASE("som training: zero alpha leaves the map untouched") {
  const Blobs data = make_blobs(20, 530);
  Rng rng(11);
  SomGrid grid = init_som_grid(3, 3, data.x, rng);
  const std::vector<double> saved = grid.weights.data();

  SomSchedule schedule;
  schedule.n_iter_input = 50;
  schedule.alpha_start = 0.0;
  schedule.radius_start = 2.0;
  fit_input_som(grid, data.x, schedule, rng);
  CHECK(grid.weights.data() == saved);
}

TEST_CASE("som output stage: constant targets keep every cell at the constant") {
  const Blobs data = make_blobs(25, 540);
  Rng rng(13);
  SomGrid grid = init_som_grid(3, 4, data.x, rng);
  SomSchedule schedule;
  schedule.n_iter_input = 200;
  schedule.n_iter_output = 200;
  schedule.radius_start = 2.0;
  fit_input_som(grid, data.x, schedule, rng);

  Rng out_rng(17);
  const std::vector<double> cells =
      fit_output_som(grid, data.x, std::vector<double>(25, 6.5), schedule, out_rng);
  REQUIRE(cells.size() == 12);
  for (double c : cells) CHECK(std::abs(c - 6.5) <= 1e-9);
}

TEST_CASE("som output stage: cells stay inside the target range") {
  const Blobs data = make_blobs(40, 550);
  Rng rng(19);
  SomGrid grid = init_som_grid(4, 4, data.x, rng);
  SomSchedule schedule;
  schedule.n_iter_input = 300;
  schedule.n_iter_output = 400;
  schedule.radius_start = 2.0;
  fit_input_som(grid, data.x, schedule, rng);

  Rng out_rng(23);
  const std::vector<double> cells = fit_output_som(grid, data.x, data.y, schedule, out_rng);
  for (double c : cells) {
    CHECK(c >= 0.0);
    CHECK(c <= 10.0);
  }
}

TEST_CASE("som prediction: reads the output cell at the input-map bmu") {
  const Blobs data = make_blobs(30, 560);
  Rng rng(29);
  SomGrid grid = init_som_grid(3, 5, data.x, rng);
  std::vector<double> cells(grid.neuron_count());
  for (std::size_t m = 0; m < cells.size(); ++m) cells[m] = static_cast<double>(m);

  const auto pred = predict_som(grid, cells, data.x);
  for (std::size_t i = 0; i < 30; ++i) {
    const auto [r, c] = find_bmu(grid, data.x.row(i), 2);
    CHECK(pred[i] == cells[r * 5 + c]);
  }
  CHECK_THROWS_AS(predict_som(grid, std::vector<double>(3, 0.0), data.x), Error);
}

TEST_CASE("som quantization error: hand-checked value") {
  SomGrid grid{1, 1, Matrix(1, 2)};
  Matrix pts(2, 2);
  pts(0, 0) = 3.0;
  pts(0, 1) = 4.0;  // distance 5
  pts(1, 0) = 0.0;
  pts(1, 1) = 0.0;  // distance 0
  CHECK(quantization_error(grid, pts) == 2.5);
  CHECK_THROWS_AS(quantization_error(grid, Matrix(0, 2)), Error);
}

TEST_CASE("som regressor: separated clusters get separated predictions") {
  const Blobs data = make_blobs(80, 570);
  const auto hp = HyperparameterSet::for_kind(
      "som", {{"rows", 4.0},
              {"cols", 5.0},
              {"n_iter_input", 800.0},
              {"n_iter_output", 800.0},
              {"radius_start", 2.0}});
  SomRegressor model(hp, 31);
  model.fit(data.x, data.y);

  const auto pred = model.predict(data.x);
  double worst = 0.0;
  for (std::size_t i = 0; i < data.y.size(); ++i)
    worst = std::max(worst, std::abs(pred[i] - data.y[i]));
  CHECK(worst < 2.0);
}

TEST_CASE("som regressor: determinism and the json round trip") {
  const Blobs data = make_blobs(30, 580);
  const auto hp = HyperparameterSet::for_kind(
      "som", {{"rows", 3.0},
              {"cols", 4.0},
              {"n_iter_input", 150.0},
              {"n_iter_output", 150.0},
              {"radius_start", 2.0}});

  SomRegressor a(hp, 3), b(hp, 3), c(hp, 4);
  a.fit(data.x, data.y);
  b.fit(data.x, data.y);
  c.fit(data.x, data.y);
  CHECK(a.predict(data.x) == b.predict(data.x));
  CHECK(a.predict(data.x) != c.predict(data.x));

  SomRegressor loaded(hp, 0);
  loaded.params_from_json(a.params_to_json());
  CHECK(loaded.predict(data.x) == a.predict(data.x));
  CHECK(loaded.grid().rows == 3);
  CHECK(loaded.grid().cols == 4);
}

TEST_CASE("som regressor: schedule validation happens at fit time") {
  const Blobs data = make_blobs(10, 590);
  const auto bad = HyperparameterSet::for_kind(
      "som", {{"rows", 2.0},
              {"cols", 2.0},
              {"n_iter_input", 10.0},
              {"n_iter_output", 10.0},
              {"alpha_start", 0.001},
              {"alpha_end", 0.1}});
  SomRegressor model(bad, 1);
  CHECK_THROWS_AS(model.fit(data.x, data.y), Error);

  CHECK_THROWS_AS(SomRegressor(HyperparameterSet::defaults("knn"), 1), Error);

  SomRegressor unfitted(HyperparameterSet::defaults("som"), 1);
  CHECK_THROWS_AS(unfitted.predict(data.x), Error);
}
