#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "soilspec/hyperparameters.hpp"
#include "soilspec/linalg.hpp"

namespace soilspec {

// Common interface for all regression models. fit() trains on a row-major
// feature matrix and a target vector of matching length; predict() maps a
// matrix with the same column count to one prediction per row.
class Regressor {
 public:
  virtual ~Regressor() = default;

  virtual void fit(const Matrix& x, const std::vector<double>& y) = 0;
  virtual std::vector<double> predict(const Matrix& x) const = 0;

  virtual std::string kind() const = 0;
  virtual const HyperparameterSet& hyperparameters() const = 0;

  // Per-feature importance summing to 1, for models that define one.
  virtual bool has_feature_importance() const { return false; }
  virtual std::vector<double> feature_importance() const;

  // Fitted-parameter (de)serialization, excluding hyperparameters.
  virtual nlohmann::json params_to_json() const = 0;
  virtual void params_from_json(const nlohmann::json& j) = 0;

 protected:
  void check_fit_inputs(const Matrix& x, const std::vector<double>& y);
  void check_predict_input(const Matrix& x) const;
  bool fitted() const { return fitted_width_ > 0; }

  std::size_t fitted_width_ = 0;
};

// Constructs a model of the given kind. `seed` feeds the model's own RNG
// streams; deterministic models ignore it.
std::unique_ptr<Regressor> make_regressor(const std::string& kind, const HyperparameterSet& hp,
                                          std::uint64_t seed);

inline std::unique_ptr<Regressor> make_regressor(const std::string& kind, std::uint64_t seed) {
  return make_regressor(kind, HyperparameterSet::defaults(kind), seed);
}

}  // namespace soilspec
