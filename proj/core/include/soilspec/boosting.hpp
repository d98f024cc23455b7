#pragma once

#include <cstdint>
#include <vector>

#include "soilspec/cart.hpp"
#include "soilspec/regressor.hpp"

namespace soilspec {

// AdaBoost.R2 with linear loss: trees fitted on weighted resamples, sample
// weights sharpened by each round's relative absolute error, prediction by
// the weighted median of the learners.
class AdaBoostRegressor : public Regressor {
 public:
  AdaBoostRegressor(const HyperparameterSet& hp, std::uint64_t seed);
  explicit AdaBoostRegressor(std::uint64_t seed)
      : AdaBoostRegressor(HyperparameterSet::defaults("adaboost"), seed) {}

  void fit(const Matrix& x, const std::vector<double>& y) override;
  std::vector<double> predict(const Matrix& x) const override;

  std::string kind() const override { return "adaboost"; }
  const HyperparameterSet& hyperparameters() const override { return hp_; }

  bool has_feature_importance() const override { return true; }
  std::vector<double> feature_importance() const override;

  nlohmann::json params_to_json() const override;
  void params_from_json(const nlohmann::json& j) override;

  const std::vector<CartTree>& learners() const { return learners_; }
  const std::vector<double>& learner_weights() const { return weights_; }
  /// Sum of the sample-weight vector after each completed reweighting round.
  const std::vector<double>& round_weight_sums() const { return round_weight_sums_; }

  // Exposed for direct verification of the aggregation rule.
  static double weighted_median(const std::vector<double>& values,
                                const std::vector<double>& weights);

 private:
  HyperparameterSet hp_;
  std::uint64_t seed_;
  std::vector<CartTree> learners_;
  std::vector<double> weights_;
  std::vector<double> round_weight_sums_;
};

// Stage-wise gradient boosting on Huber loss (squared-error available for
// comparison runs): depth-limited trees fitted to the loss gradient, leaf
// values rewritten by the per-leaf line-search step, shrunken accumulation.
class GradientBoostingRegressor : public Regressor {
 public:
  GradientBoostingRegressor(const HyperparameterSet& hp, std::uint64_t seed);
  explicit GradientBoostingRegressor(std::uint64_t seed)
      : GradientBoostingRegressor(HyperparameterSet::defaults("gb"), seed) {}

  void fit(const Matrix& x, const std::vector<double>& y) override;
  std::vector<double> predict(const Matrix& x) const override;

  std::string kind() const override { return "gb"; }
  const HyperparameterSet& hyperparameters() const override { return hp_; }

  bool has_feature_importance() const override { return true; }
  std::vector<double> feature_importance() const override;

  nlohmann::json params_to_json() const override;
  void params_from_json(const nlohmann::json& j) override;

  double initial_prediction() const { return init_; }
  const std::vector<CartTree>& stages() const { return stages_; }
  const std::vector<double>& training_loss_curve() const { return loss_curve_; }

 private:
  HyperparameterSet hp_;
  std::uint64_t seed_;
  double init_ = 0.0;
  std::vector<CartTree> stages_;
  std::vector<double> loss_curve_;
};

double median(std::vector<double> values);
// q-quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

}  // namespace soilspec
