#pragma once

#include <cstdint>
#include <vector>

#include "soilspec/cart.hpp"
#include "soilspec/regressor.hpp"

namespace soilspec {

// Bagged tree ensembles: "rf" bootstraps the training set and scans
// exhaustive splits; "et" keeps the full sample and draws one random
// threshold per candidate feature. Both subsample ceil(d/3) candidate
// features per node unless configured otherwise, and predict the tree mean.
class ForestRegressor : public Regressor {
 public:
  ForestRegressor(const std::string& kind, const HyperparameterSet& hp, std::uint64_t seed);

  void fit(const Matrix& x, const std::vector<double>& y) override;
  std::vector<double> predict(const Matrix& x) const override;

  std::string kind() const override { return kind_; }
  const HyperparameterSet& hyperparameters() const override { return hp_; }

  bool has_feature_importance() const override { return true; }
  std::vector<double> feature_importance() const override;

  nlohmann::json params_to_json() const override;
  void params_from_json(const nlohmann::json& j) override;

  const std::vector<CartTree>& trees() const { return trees_; }

 private:
  std::string kind_;
  HyperparameterSet hp_;
  std::uint64_t seed_;
  std::vector<CartTree> trees_;
};

}  // namespace soilspec
