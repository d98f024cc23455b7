#include "soilspec/forest.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "soilspec/error.hpp"
#include "soilspec/parallel.hpp"

namespace soilspec {

ForestRegressor::ForestRegressor(const std::string& kind, const HyperparameterSet& hp,
                                 std::uint64_t seed)
    : kind_(kind), hp_(hp), seed_(seed) {
  require(kind == "rf" || kind == "et", "ForestRegressor: kind must be rf or et");
  require(hp.kind() == kind, "ForestRegressor: wrong hyperparameter kind");
}

void ForestRegressor::fit(const Matrix& x, const std::vector<double>& y) {
  check_fit_inputs(x, y);
  const std::size_t n = x.rows();
  require(n >= 2, "fit: needs at least 2 samples");

  TreeParams params;
  params.max_depth = static_cast<std::size_t>(hp_.get_int("max_depth"));
  params.min_samples_split = static_cast<std::size_t>(hp_.get_int("min_samples_split"));
  params.split_mode = kind_ == "rf" ? SplitMode::exhaustive : SplitMode::random_threshold;
  std::size_t max_features = static_cast<std::size_t>(hp_.get_int("max_features"));
  if (max_features == 0)
    max_features = (x.cols() + 2) / 3;  // ceil(d/3)
  require(max_features <= x.cols(), "fit: max_features exceeds feature count");
  params.features_per_split = max_features;

  const bool bootstrap = kind_ == "rf" && hp_.get_int("bootstrap") != 0;
  const std::size_t n_trees = static_cast<std::size_t>(hp_.get_int("n_estimators"));
  trees_.assign(n_trees, CartTree());

  parallel_for(n_trees, [&](std::size_t t) {
    Rng rng(derive_seed(seed_, "tree", t));
    std::vector<std::size_t> idx(n);
    if (bootstrap) {
      for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::size_t>(rng.uniform_int(n));
    } else {
      for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    }
    trees_[t].fit(x, y, std::move(idx), params, rng);
  });
}

std::vector<double> ForestRegressor::predict(const Matrix& x) const {
  check_predict_input(x);
  require(!trees_.empty(), "predict: ensemble has no trees");
  std::vector<double> out(x.rows(), 0.0);
  const double inv = 1.0 / static_cast<double>(trees_.size());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double sum = 0.0;
    for (const CartTree& tree : trees_) sum += tree.predict_one(x.row(i), x.cols());
    out[i] = sum * inv;
  }
  return out;
}

std::vector<double> ForestRegressor::feature_importance() const {
  require(!trees_.empty(), "feature_importance: ensemble has no trees");
  std::vector<double> acc(fitted_width_, 0.0);
  for (const CartTree& tree : trees_) tree.add_importance(acc, 1.0);
  double total = 0.0;
  for (double v : acc) total += v;
  if (total > 0.0)
    for (double& v : acc) v /= total;
  return acc;
}

nlohmann::json ForestRegressor::params_to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const CartTree& tree : trees_) trees.push_back(tree.to_json());
  return {{"trees", trees}, {"n_features", fitted_width_}};
}

void ForestRegressor::params_from_json(const nlohmann::json& j) {
  trees_.clear();
  for (const auto& tj : j.at("trees")) trees_.push_back(CartTree::from_json(tj));
  require(!trees_.empty(), "forest: no stored trees");
  fitted_width_ = j.at("n_features").get<std::size_t>();
}

}  // namespace soilspec
