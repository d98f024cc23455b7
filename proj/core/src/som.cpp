#include "soilspec/som.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "soilspec/error.hpp"

namespace soilspec {

double schedule_value(double start, double end, long t, long total) {
  require(total > 0 && t >= 0 && t <= total, "schedule: iteration out of range");
  if (start == 0.0) return 0.0;
  return start * std::pow(end / start, static_cast<double>(t) / static_cast<double>(total));
}

double neighborhood_weight(double grid_distance, double radius) {
  require(radius > 0.0, "neighborhood_weight: radius must be positive");
  require(grid_distance >= 0.0, "neighborhood_weight: negative distance");
  return std::exp(-(grid_distance * grid_distance) / (2.0 * radius * radius));
}

std::pair<std::size_t, std::size_t> find_bmu(const SomGrid& grid, const double* x,
                                             std::size_t width) {
  require(grid.neuron_count() > 0, "find_bmu: empty grid");
  require(width == grid.weights.cols(), "find_bmu: width mismatch");
  std::size_t best = 0;
  double best_d = squared_distance(grid.weights.row(0), x, width);
  for (std::size_t m = 1; m < grid.neuron_count(); ++m) {
    const double d = squared_distance(grid.weights.row(m), x, width);
    if (d < best_d) {
      best_d = d;
      best = m;
    }
  }
  return {best / grid.cols, best % grid.cols};
}

SomGrid init_som_grid(std::size_t rows, std::size_t cols, const Matrix& features, Rng& rng) {
  require(rows > 0 && cols > 0, "som: empty grid shape");
  require(features.rows() > 0, "som: empty training set");
  const std::size_t d = features.cols();
  std::vector<double> lo(d), hi(d);
  for (std::size_t j = 0; j < d; ++j) lo[j] = hi[j] = features(0, j);
  for (std::size_t i = 1; i < features.rows(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      lo[j] = std::min(lo[j], features(i, j));
      hi[j] = std::max(hi[j], features(i, j));
    }
  }
  SomGrid grid{rows, cols, Matrix(rows * cols, d)};
  for (std::size_t m = 0; m < grid.neuron_count(); ++m)
    for (std::size_t j = 0; j < d; ++j)
      grid.weights(m, j) = lo[j] == hi[j] ? lo[j] : rng.uniform(lo[j], hi[j]);
  return grid;
}

namespace {

// One online update sweep shared by both training stages; `values` is either
// the full weight matrix (input stage) or the scalar output cells.
template <typename UpdateFn>
void neighborhood_sweep(const SomGrid& grid, std::size_t bmu_row, std::size_t bmu_col,
                        double alpha, double radius, UpdateFn&& update) {
  const double inv = 1.0 / (2.0 * radius * radius);
  for (std::size_t r = 0; r < grid.rows; ++r) {
    const double dr = static_cast<double>(r) - static_cast<double>(bmu_row);
    for (std::size_t c = 0; c < grid.cols; ++c) {
      const double dc = static_cast<double>(c) - static_cast<double>(bmu_col);
      const double h = std::exp(-(dr * dr + dc * dc) * inv);
      update(r * grid.cols + c, alpha * h);
    }
  }
}

}  // namespace

void fit_input_som(SomGrid& grid, const Matrix& features, const SomSchedule& schedule, Rng& rng) {
  require(features.rows() > 0, "fit_input_som: empty training set");
  require(features.cols() == grid.weights.cols(), "fit_input_som: width mismatch");
  const std::size_t n = features.rows();
  const std::size_t d = features.cols();
  for (long t = 1; t <= schedule.n_iter_input; ++t) {
    const std::size_t pick = static_cast<std::size_t>(rng.uniform_int(n));
    const double* x = features.row(pick);
    const auto [br, bc] = find_bmu(grid, x, d);
    const double alpha = schedule_value(schedule.alpha_start, schedule.alpha_end, t,
                                        schedule.n_iter_input);
    const double radius = schedule_value(schedule.radius_start, schedule.radius_end, t,
                                         schedule.n_iter_input);
    if (alpha == 0.0) continue;
    neighborhood_sweep(grid, br, bc, alpha, radius, [&](std::size_t m, double step) {
      double* w = grid.weights.row(m);
      for (std::size_t j = 0; j < d; ++j) w[j] += step * (x[j] - w[j]);
    });
  }
}

std::vector<double> fit_output_som(const SomGrid& grid, const Matrix& features,
                                   const std::vector<double>& targets,
                                   const SomSchedule& schedule, Rng& rng) {
  require(features.rows() > 0, "fit_output_som: empty training set");
  require(features.rows() == targets.size(), "fit_output_som: feature/target length mismatch");
  const std::size_t n = features.rows();

  double mean = 0.0;
  for (double y : targets) mean += y;
  mean /= static_cast<double>(n);
  std::vector<double> output(grid.neuron_count(), mean);

  // The input map is frozen, so each row's BMU can be resolved once.
  std::vector<std::pair<std::size_t, std::size_t>> bmus(n);
  for (std::size_t i = 0; i < n; ++i) bmus[i] = find_bmu(grid, features.row(i), features.cols());

  for (long t = 1; t <= schedule.n_iter_output; ++t) {
    const std::size_t pick = static_cast<std::size_t>(rng.uniform_int(n));
    const auto [br, bc] = bmus[pick];
    const double y = targets[pick];
    const double alpha = schedule_value(schedule.alpha_start, schedule.alpha_end, t,
                                        schedule.n_iter_output);
    const double radius = schedule_value(schedule.radius_start, schedule.radius_end, t,
                                         schedule.n_iter_output);
    if (alpha == 0.0) continue;
    neighborhood_sweep(grid, br, bc, alpha, radius,
                       [&](std::size_t m, double step) { output[m] += step * (y - output[m]); });
  }
  return output;
}

std::vector<double> predict_som(const SomGrid& grid, const std::vector<double>& output,
                                const Matrix& features) {
  require(output.size() == grid.neuron_count(), "predict_som: output size mismatch");
  std::vector<double> out(features.rows());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const auto [r, c] = find_bmu(grid, features.row(i), features.cols());
    out[i] = output[r * grid.cols + c];
  }
  return out;
}

double quantization_error(const SomGrid& grid, const Matrix& features) {
  require(features.rows() > 0, "quantization_error: empty set");
  double total = 0.0;
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const auto [r, c] = find_bmu(grid, features.row(i), features.cols());
    total += std::sqrt(
        squared_distance(grid.weights.row(r * grid.cols + c), features.row(i), features.cols()));
  }
  return total / static_cast<double>(features.rows());
}

SomRegressor::SomRegressor(const HyperparameterSet& hp, std::uint64_t seed)
    : hp_(hp), seed_(seed) {
  require(hp.kind() == "som", "SomRegressor: wrong hyperparameter kind");
}

SomSchedule SomRegressor::resolve_schedule() const {
  SomSchedule s;
  s.n_iter_input = hp_.get_int("n_iter_input");
  s.n_iter_output = hp_.get_int("n_iter_output");
  s.alpha_start = hp_.get_double("alpha_start");
  s.alpha_end = hp_.get_double("alpha_end");
  s.radius_start = hp_.get_double("radius_start");
  if (s.radius_start == 0.0)
    s.radius_start =
        static_cast<double>(std::max(hp_.get_int("rows"), hp_.get_int("cols"))) / 2.0;
  s.radius_end = hp_.get_double("radius_end");
  require(s.alpha_start >= s.alpha_end, "som: alpha_start must be >= alpha_end");
  require(s.radius_start >= s.radius_end, "som: radius_start must be >= radius_end");
  return s;
}

void SomRegressor::fit(const Matrix& x, const std::vector<double>& y) {
  check_fit_inputs(x, y);
  const SomSchedule schedule = resolve_schedule();
  Rng input_rng(derive_seed(seed_, "som-input"));
  grid_ = init_som_grid(static_cast<std::size_t>(hp_.get_int("rows")),
                        static_cast<std::size_t>(hp_.get_int("cols")), x, input_rng);
  fit_input_som(grid_, x, schedule, input_rng);
  Rng output_rng(derive_seed(seed_, "som-output"));
  output_ = fit_output_som(grid_, x, y, schedule, output_rng);
}

std::vector<double> SomRegressor::predict(const Matrix& x) const {
  check_predict_input(x);
  return predict_som(grid_, output_, x);
}

nlohmann::json SomRegressor::params_to_json() const {
  std::vector<std::vector<double>> w(grid_.neuron_count());
  for (std::size_t m = 0; m < grid_.neuron_count(); ++m)
    w[m].assign(grid_.weights.row(m), grid_.weights.row(m) + grid_.weights.cols());
  return {{"rows", grid_.rows}, {"cols", grid_.cols}, {"weights", w}, {"output", output_}};
}

void SomRegressor::params_from_json(const nlohmann::json& j) {
  grid_.rows = j.at("rows").get<std::size_t>();
  grid_.cols = j.at("cols").get<std::size_t>();
  auto w = j.at("weights").get<std::vector<std::vector<double>>>();
  require(w.size() == grid_.neuron_count(), "som: stored weight count mismatch");
  require(!w.empty() && !w[0].empty(), "som: empty stored weights");
  grid_.weights = Matrix(w.size(), w[0].size());
  for (std::size_t m = 0; m < w.size(); ++m) {
    require(w[m].size() == grid_.weights.cols(), "som: ragged stored weights");
    for (std::size_t c = 0; c < w[m].size(); ++c) grid_.weights(m, c) = w[m][c];
  }
  output_ = j.at("output").get<std::vector<double>>();
  require(output_.size() == grid_.neuron_count(), "som: stored output size mismatch");
  fitted_width_ = grid_.weights.cols();
}

}  // namespace soilspec
