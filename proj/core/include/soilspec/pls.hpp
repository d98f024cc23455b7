#pragma once

#include <vector>

#include "soilspec/regressor.hpp"

namespace soilspec {

// Single-target partial least squares, fitted by iterative NIPALS extraction
// with x-deflation. Prediction replays the deflation sequence per row.
class PlsRegressor : public Regressor {
 public:
  explicit PlsRegressor(const HyperparameterSet& hp = HyperparameterSet::defaults("pls"));

  void fit(const Matrix& x, const std::vector<double>& y) override;
  std::vector<double> predict(const Matrix& x) const override;

  std::string kind() const override { return "pls"; }
  const HyperparameterSet& hyperparameters() const override { return hp_; }

  nlohmann::json params_to_json() const override;
  void params_from_json(const nlohmann::json& j) override;

  std::size_t n_components_fitted() const { return x_weights_.size(); }

 private:
  HyperparameterSet hp_;
  std::vector<std::vector<double>> x_weights_;   // w_a, unit norm
  std::vector<std::vector<double>> x_loadings_;  // p_a
  std::vector<double> y_loadings_;               // c_a
  std::vector<double> x_mean_;
  double y_mean_ = 0.0;
};

}  // namespace soilspec
