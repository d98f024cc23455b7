#pragma once

#include <vector>

#include "soilspec/regressor.hpp"

namespace soilspec {

// k-nearest-neighbour regression with exact brute-force search. With
// distance weighting, an exact match short-circuits to the mean of all
// zero-distance targets.
class KnnRegressor : public Regressor {
 public:
  explicit KnnRegressor(const HyperparameterSet& hp = HyperparameterSet::defaults("knn"));

  void fit(const Matrix& x, const std::vector<double>& y) override;
  std::vector<double> predict(const Matrix& x) const override;

  std::string kind() const override { return "knn"; }
  const HyperparameterSet& hyperparameters() const override { return hp_; }

  nlohmann::json params_to_json() const override;
  void params_from_json(const nlohmann::json& j) override;

 private:
  double predict_one(const double* q) const;

  HyperparameterSet hp_;
  Matrix train_x_;
  std::vector<double> train_y_;
};

}  // namespace soilspec
