#pragma once

#include <cstdint>
#include <vector>

#include "soilspec/regressor.hpp"

namespace soilspec {

// Dense feed-forward network, rectified-linear hidden layers and a single
// linear output, trained by mini-batch gradient descent with per-parameter
// adaptive moments under mean-squared-error loss.
class MlpRegressor : public Regressor {
 public:
  struct Layer {
    Matrix w;                // (out x in), row-major
    std::vector<double> b;   // out
  };

  MlpRegressor(const HyperparameterSet& hp, std::uint64_t seed);
  explicit MlpRegressor(std::uint64_t seed)
      : MlpRegressor(HyperparameterSet::defaults("mlp"), seed) {}

  void fit(const Matrix& x, const std::vector<double>& y) override;
  std::vector<double> predict(const Matrix& x) const override;

  std::string kind() const override { return "mlp"; }
  const HyperparameterSet& hyperparameters() const override { return hp_; }

  nlohmann::json params_to_json() const override;
  void params_from_json(const nlohmann::json& j) override;

  // Parameter access for inspection and gradient checking.
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  // Builds the network for input width d without training.
  void initialize(std::size_t input_width);

  // Mean-squared-error loss over (x, y) under the current parameters, with
  // gradients in the same layer layout. Public so tests can difference it.
  double loss_and_gradients(const Matrix& x, const std::vector<double>& y,
                            std::vector<Layer>& grads) const;

 private:
  std::vector<double> forward(const double* x, std::vector<std::vector<double>>* activations) const;

  HyperparameterSet hp_;
  std::uint64_t seed_;
  std::vector<Layer> layers_;
};

}  // namespace soilspec
