#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "soilspec/dataset.hpp"
#include "soilspec/hyperparameters.hpp"
#include "soilspec/preprocess.hpp"
#include "soilspec/regressor.hpp"

namespace soilspec {

struct Metrics {
  double r_squared = 0.0;
  double rmse = 0.0;
  std::size_t n = 0;
};

// 1 - sum (y - yhat)^2 / sum (y - ybar)^2. Errors on zero-variance truth.
double r_squared(const std::vector<double>& y_true, const std::vector<double>& y_pred);
double rmse(const std::vector<double>& y_true, const std::vector<double>& y_pred);

// Seeded shuffle followed by contiguous chunking; fold sizes differ by at
// most one (the first n % k folds take the extra element).
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k,
                                                  std::uint64_t seed);

struct GridSpec {
  std::string kind;
  // Axes in listed order; candidate order within an axis breaks ties.
  std::vector<std::pair<std::string, std::vector<HpValue>>> axes;

  std::size_t point_count() const;
  // Hyperparameters of the i-th Cartesian point (last axis varies fastest).
  HyperparameterSet point(std::size_t index) const;
};

struct CvRow {
  std::size_t point_index = 0;
  std::vector<std::pair<std::string, HpValue>> values;  // grid-axis assignments
  std::vector<double> fold_r2;
  std::vector<double> fold_rmse;
  double mean_r2 = 0.0;
  double mean_rmse = 0.0;
  bool failed = false;
  std::string failure;
};

struct GridSearchResult {
  std::size_t best_index = 0;
  HyperparameterSet best;
  std::vector<CvRow> table;
  std::vector<std::size_t> fold_sizes;
};

// Cross-validated search over the Cartesian grid: per point, mean R^2 over
// k folds; best by highest mean R^2, then lower mean RMSE, then listing
// order. A fit failure on any fold disqualifies the point but is recorded.
GridSearchResult grid_search(const Matrix& x, const std::vector<double>& y, const GridSpec& grid,
                             std::size_t k, std::uint64_t seed);

struct ExperimentConfig {
  PreprocessMode mode = PreprocessMode::none;
  std::string model_kind;
  HyperparameterSet hp;
  std::size_t train_count = 0;
  std::vector<std::uint64_t> seeds;  // one run per entry
  bool resplit_per_seed = true;
  std::size_t pca_components = 20;
  std::size_t hist2d_bins = 20;
};

struct SeedRun {
  std::uint64_t seed = 0;
  Metrics train;
  Metrics test;
  // Always in percent soil moisture; equals test.rmse unless mode == scaling.
  double test_rmse_pct = 0.0;
  // Model-space RMSE under scaling ("in 1"); unset otherwise.
  std::optional<double> test_rmse_scaled;
  std::vector<double> test_targets;
  std::vector<double> test_predictions;  // percent soil moisture
};

struct Histogram2d {
  std::vector<double> edges;  // shared by both axes
  std::vector<std::vector<long>> counts;  // [true_bin][pred_bin]
};

// Square binning over the combined range of truth and prediction.
Histogram2d prediction_histogram2d(const std::vector<double>& y_true,
                                   const std::vector<double>& y_pred, std::size_t n_bins);

struct RegressionReport {
  ExperimentConfig config;
  std::size_t n_samples = 0;
  std::size_t n_features = 0;
  std::size_t test_count = 0;
  std::vector<SeedRun> runs;
  Metrics aggregate_test_mean;  // n = seed count
  Metrics aggregate_test_std;
  Metrics aggregate_train_mean;
  Metrics aggregate_train_std;
  std::optional<std::vector<double>> importances;  // mean over seeds
  std::optional<Histogram2d> hist2d;               // pooled over seeds

  nlohmann::json to_json() const;
};

struct ExperimentResult {
  RegressionReport report;
  std::vector<std::unique_ptr<Regressor>> models;        // one per seed
  std::vector<PreprocessorState> preprocessors;          // one per seed
};

// The full protocol: per seed, split / preprocess (train statistics only) /
// fit / score; aggregates over seeds; importances and pooled 2-d histogram
// attached when the model provides them.
ExperimentResult run_experiment(const ExperimentConfig& config, const Dataset& data);

// Flat CSV emitters for the report and search outputs.
void write_per_seed_csv(const RegressionReport& report, const std::string& path);
void write_cv_table_csv(const GridSearchResult& result, const std::string& path);
void write_hist2d_csv(const Histogram2d& hist, const std::string& path);
void write_importances_csv(const std::vector<double>& importances, const BandAxis& axis,
                           const std::string& path);

// Plot-data table: wavelength (or LWIR), mean, standard deviation and
// importance per feature, in band order.
void write_importance_spectrum_csv(const std::vector<double>& importances, const BandAxis& axis,
                                   const std::vector<double>& feature_means,
                                   const std::vector<double>& feature_stds,
                                   const std::string& path);

}  // namespace soilspec
