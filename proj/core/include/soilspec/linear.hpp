#pragma once

#include <vector>

#include "soilspec/regressor.hpp"

namespace soilspec {

// Ordinary least squares with intercept, solved through a rank-revealing
// orthogonal factorization; rank-deficient systems get the minimum-norm
// solution.
class LinearRegressor : public Regressor {
 public:
  explicit LinearRegressor(const HyperparameterSet& hp = HyperparameterSet::defaults("linear"));

  void fit(const Matrix& x, const std::vector<double>& y) override;
  std::vector<double> predict(const Matrix& x) const override;

  std::string kind() const override { return "linear"; }
  const HyperparameterSet& hyperparameters() const override { return hp_; }

  nlohmann::json params_to_json() const override;
  void params_from_json(const nlohmann::json& j) override;

  const std::vector<double>& weights() const { return weights_; }
  double intercept() const { return intercept_; }

 private:
  HyperparameterSet hp_;
  std::vector<double> weights_;
  double intercept_ = 0.0;
};

}  // namespace soilspec
