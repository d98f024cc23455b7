#pragma once

#include <vector>

#include "soilspec/regressor.hpp"

namespace soilspec {

// Epsilon-insensitive support vector regression with an RBF kernel,
// k(x, z) = exp(-gamma * ||x - z||^2), trained by sequential minimal
// optimization on the 2n-variable dual with maximal-violating-pair
// working-set selection.
class SvrRegressor : public Regressor {
 public:
  explicit SvrRegressor(const HyperparameterSet& hp = HyperparameterSet::defaults("svr"));

  void fit(const Matrix& x, const std::vector<double>& y) override;
  std::vector<double> predict(const Matrix& x) const override;

  std::string kind() const override { return "svr"; }
  const HyperparameterSet& hyperparameters() const override { return hp_; }

  nlohmann::json params_to_json() const override;
  void params_from_json(const nlohmann::json& j) override;

  // Full-length alpha - alpha* vector aligned with the fit-time training
  // rows (available on freshly fitted models, not after load).
  const std::vector<double>& training_dual_coefficients() const { return full_coef_; }
  double bias() const { return bias_; }
  bool converged() const { return converged_; }

 private:
  HyperparameterSet hp_;
  Matrix support_vectors_;
  std::vector<double> coef_;  // nonzero alpha - alpha*, one per support vector
  double bias_ = 0.0;
  bool converged_ = true;
  std::vector<double> full_coef_;
};

}  // namespace soilspec
