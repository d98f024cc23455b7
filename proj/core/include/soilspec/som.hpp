#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "soilspec/regressor.hpp"
#include "soilspec/rng.hpp"

namespace soilspec {

// Rectangular self-organizing map: neuron (r, c) holds weights.row(r*cols+c),
// grid distance is Euclidean on integer coordinates.
struct SomGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Matrix weights{0, 0};

  std::size_t neuron_count() const { return rows * cols; }
};

struct SomSchedule {
  long n_iter_input = 5000;
  long n_iter_output = 8000;
  double alpha_start = 0.4;
  double alpha_end = 0.005;
  double radius_start = 35.0;
  double radius_end = 1.0;
};

// Exponential interpolation start*(end/start)^(t/T); hits both endpoints
// exactly (t = 0 and t = T).
double schedule_value(double start, double end, long t, long total);

// Grid-space neighborhood falloff exp(-d^2 / (2 r^2)).
double neighborhood_weight(double grid_distance, double radius);

// Coordinates of the neuron nearest to x; ties go to the lowest row, then
// the lowest column.
std::pair<std::size_t, std::size_t> find_bmu(const SomGrid& grid, const double* x,
                                             std::size_t width);

// Initializes neuron weights uniformly within the per-feature data range.
SomGrid init_som_grid(std::size_t rows, std::size_t cols, const Matrix& features, Rng& rng);

// Sequential online training: per iteration draw one row, move every neuron
// toward it weighted by the neighborhood of the BMU.
void fit_input_som(SomGrid& grid, const Matrix& features, const SomSchedule& schedule, Rng& rng);

// Supervised pass against the frozen input map: output cells chase the
// targets of rows whose BMU neighborhood they fall in. Returns one scalar
// per neuron, initialized at the mean target.
std::vector<double> fit_output_som(const SomGrid& grid, const Matrix& features,
                                   const std::vector<double>& targets,
                                   const SomSchedule& schedule, Rng& rng);

// Prediction = output cell at the input-map BMU.
std::vector<double> predict_som(const SomGrid& grid, const std::vector<double>& output,
                                const Matrix& features);

// Mean Euclidean distance from each row to its BMU's weight vector.
double quantization_error(const SomGrid& grid, const Matrix& features);

// Regressor adapter over the two-stage map.
class SomRegressor : public Regressor {
 public:
  SomRegressor(const HyperparameterSet& hp, std::uint64_t seed);
  explicit SomRegressor(std::uint64_t seed)
      : SomRegressor(HyperparameterSet::defaults("som"), seed) {}

  void fit(const Matrix& x, const std::vector<double>& y) override;
  std::vector<double> predict(const Matrix& x) const override;

  std::string kind() const override { return "som"; }
  const HyperparameterSet& hyperparameters() const override { return hp_; }

  nlohmann::json params_to_json() const override;
  void params_from_json(const nlohmann::json& j) override;

  const SomGrid& grid() const { return grid_; }
  const std::vector<double>& output_cells() const { return output_; }

 private:
  SomSchedule resolve_schedule() const;

  HyperparameterSet hp_;
  std::uint64_t seed_;
  SomGrid grid_;
  std::vector<double> output_;
};

}  // namespace soilspec
