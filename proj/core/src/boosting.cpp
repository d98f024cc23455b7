#include "soilspec/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "soilspec/error.hpp"

namespace soilspec {

double median(std::vector<double> values) {
  require(!values.empty(), "median of empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double quantile(std::vector<double> values, double q) {
  require(!values.empty(), "quantile of empty set");
  require(q >= 0.0 && q <= 1.0, "quantile level outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

// ---------------------------------------------------------------- AdaBoost

AdaBoostRegressor::AdaBoostRegressor(const HyperparameterSet& hp, std::uint64_t seed)
    : hp_(hp), seed_(seed) {
  require(hp.kind() == "adaboost", "AdaBoostRegressor: wrong hyperparameter kind");
}

double AdaBoostRegressor::weighted_median(const std::vector<double>& values,
                                          const std::vector<double>& weights) {
  require(!values.empty() && values.size() == weights.size(), "weighted_median: bad inputs");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  double total = 0.0;
  for (double w : weights) total += w;
  double cum = 0.0;
  for (std::size_t i : order) {
    cum += weights[i];
    if (cum >= 0.5 * total) return values[i];
  }
  return values[order.back()];
}

void AdaBoostRegressor::fit(const Matrix& x, const std::vector<double>& y) {
  check_fit_inputs(x, y);
  const std::size_t n = x.rows();
  require(n >= 2, "fit: needs at least 2 samples");
  const long rounds = hp_.get_int("n_estimators");
  const double lr = hp_.get_double("learning_rate");

  TreeParams params;
  params.max_depth = static_cast<std::size_t>(hp_.get_int("max_depth"));

  Rng rng(derive_seed(seed_, "boost"));
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<double> cumulative(n);
  learners_.clear();
  weights_.clear();
  round_weight_sums_.clear();

  for (long round = 0; round < rounds; ++round) {
    std::partial_sum(w.begin(), w.end(), cumulative.begin());
    const double total = cumulative.back();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng.uniform01() * total;
      idx[i] = static_cast<std::size_t>(
          std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
      if (idx[i] >= n) idx[i] = n - 1;
    }

    CartTree tree;
    tree.fit(x, y, std::move(idx), params, rng);

    double max_res = 0.0;
    std::vector<double> res(n);
    for (std::size_t i = 0; i < n; ++i) {
      res[i] = std::abs(tree.predict_one(x.row(i), x.cols()) - y[i]);
      max_res = std::max(max_res, res[i]);
    }
    if (max_res == 0.0) {
      // Perfect learner; clamp beta away from zero for a finite vote.
      learners_.push_back(std::move(tree));
      weights_.push_back(lr * std::log(1.0 / 1e-10));
      break;
    }

    double avg_loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) avg_loss += w[i] * (res[i] / max_res);
    if (avg_loss >= 0.5) {
      if (learners_.empty()) {
        learners_.push_back(std::move(tree));
        weights_.push_back(lr * std::log((1.0 - avg_loss) / avg_loss));
      }
      break;
    }

    const double beta = avg_loss / (1.0 - avg_loss);
    learners_.push_back(std::move(tree));
    weights_.push_back(lr * std::log(1.0 / beta));

    double wsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] *= std::pow(beta, (1.0 - res[i] / max_res) * lr);
      wsum += w[i];
    }
    require(wsum > 0.0 && std::isfinite(wsum), "fit: sample weights collapsed");
    for (double& v : w) v /= wsum;
    round_weight_sums_.push_back(std::accumulate(w.begin(), w.end(), 0.0));
  }
}

std::vector<double> AdaBoostRegressor::predict(const Matrix& x) const {
  check_predict_input(x);
  require(!learners_.empty(), "predict: no fitted learners");
  std::vector<double> out(x.rows());
  std::vector<double> preds(learners_.size());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t t = 0; t < learners_.size(); ++t)
      preds[t] = learners_[t].predict_one(x.row(i), x.cols());
    out[i] = weighted_median(preds, weights_);
  }
  return out;
}

std::vector<double> AdaBoostRegressor::feature_importance() const {
  require(!learners_.empty(), "feature_importance: no fitted learners");
  std::vector<double> acc(fitted_width_, 0.0);
  for (std::size_t t = 0; t < learners_.size(); ++t)
    learners_[t].add_importance(acc, weights_[t]);
  double total = 0.0;
  for (double v : acc) total += v;
  if (total > 0.0)
    for (double& v : acc) v /= total;
  return acc;
}

nlohmann::json AdaBoostRegressor::params_to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const CartTree& tree : learners_) trees.push_back(tree.to_json());
  return {{"trees", trees}, {"weights", weights_}, {"n_features", fitted_width_}};
}

void AdaBoostRegressor::params_from_json(const nlohmann::json& j) {
  learners_.clear();
  for (const auto& tj : j.at("trees")) learners_.push_back(CartTree::from_json(tj));
  weights_ = j.at("weights").get<std::vector<double>>();
  require(!learners_.empty() && learners_.size() == weights_.size(),
          "adaboost: stored learner/weight mismatch");
  fitted_width_ = j.at("n_features").get<std::size_t>();
}

// ------------------------------------------------------- Gradient boosting

GradientBoostingRegressor::GradientBoostingRegressor(const HyperparameterSet& hp,
                                                     std::uint64_t seed)
    : hp_(hp), seed_(seed) {
  require(hp.kind() == "gb", "GradientBoostingRegressor: wrong hyperparameter kind");
}

void GradientBoostingRegressor::fit(const Matrix& x, const std::vector<double>& y) {
  check_fit_inputs(x, y);
  const std::size_t n = x.rows();
  require(n >= 2, "fit: needs at least 2 samples");
  const long n_stages = hp_.get_int("n_estimators");
  const double lr = hp_.get_double("learning_rate");
  const bool huber = hp_.get_string("loss") == "huber";
  const double alpha = hp_.get_double("alpha");

  TreeParams params;
  params.max_depth = static_cast<std::size_t>(hp_.get_int("max_depth"));

  Rng rng(derive_seed(seed_, "stage"));  // exhaustive full-feature trees draw nothing
  init_ = median(y);
  stages_.clear();
  loss_curve_.clear();

  std::vector<double> f(n, init_);
  std::vector<double> res(n), grad(n), abs_res(n);
  for (long stage = 0; stage < n_stages; ++stage) {
    double max_abs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      res[i] = y[i] - f[i];
      abs_res[i] = std::abs(res[i]);
      max_abs = std::max(max_abs, abs_res[i]);
    }
    if (max_abs == 0.0) break;

    double delta = 0.0;
    double loss = 0.0;
    if (huber) {
      delta = quantile(abs_res, alpha);
      for (std::size_t i = 0; i < n; ++i) {
        grad[i] = abs_res[i] <= delta ? res[i] : delta * (res[i] > 0.0 ? 1.0 : -1.0);
        loss += abs_res[i] <= delta ? 0.5 * res[i] * res[i]
                                    : delta * (abs_res[i] - 0.5 * delta);
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        grad[i] = res[i];
        loss += 0.5 * res[i] * res[i];
      }
    }
    loss_curve_.push_back(loss / static_cast<double>(n));

    CartTree tree;
    tree.fit(x, grad, params, rng);

    if (huber) {
      // Per-leaf line search: median residual plus the clipped-mean correction.
      std::map<int, std::vector<double>> leaf_res;
      std::vector<int> leaf_of(n);
      for (std::size_t i = 0; i < n; ++i) {
        leaf_of[i] = tree.leaf_for(x.row(i), x.cols());
        leaf_res[leaf_of[i]].push_back(res[i]);
      }
      for (auto& [leaf, rs] : leaf_res) {
        const double med = median(rs);
        double corr = 0.0;
        for (double r : rs) corr += std::clamp(r - med, -delta, delta);
        corr /= static_cast<double>(rs.size());
        tree.set_value(leaf, med + corr);
      }
    }

    for (std::size_t i = 0; i < n; ++i) f[i] += lr * tree.predict_one(x.row(i), x.cols());
    stages_.push_back(std::move(tree));
  }
}

std::vector<double> GradientBoostingRegressor::predict(const Matrix& x) const {
  check_predict_input(x);
  const double lr = hp_.get_double("learning_rate");
  std::vector<double> out(x.rows(), init_);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (const CartTree& tree : stages_) out[i] += lr * tree.predict_one(x.row(i), x.cols());
  return out;
}

std::vector<double> GradientBoostingRegressor::feature_importance() const {
  std::vector<double> acc(fitted_width_, 0.0);
  for (const CartTree& tree : stages_) tree.add_importance(acc, 1.0);
  double total = 0.0;
  for (double v : acc) total += v;
  if (total > 0.0)
    for (double& v : acc) v /= total;
  return acc;
}

nlohmann::json GradientBoostingRegressor::params_to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const CartTree& tree : stages_) trees.push_back(tree.to_json());
  return {{"init", init_}, {"trees", trees}, {"n_features", fitted_width_}};
}

void GradientBoostingRegressor::params_from_json(const nlohmann::json& j) {
  init_ = j.at("init").get<double>();
  stages_.clear();
  for (const auto& tj : j.at("trees")) stages_.push_back(CartTree::from_json(tj));
  fitted_width_ = j.at("n_features").get<std::size_t>();
}

}  // namespace soilspec
