#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "soilspec/linalg.hpp"

namespace soilspec {

enum class PreprocessMode { none, pca, scaling };

PreprocessMode preprocess_mode_from_string(const std::string& name);
std::string to_string(PreprocessMode mode);

struct PcaModel {
  std::vector<double> mean;          // per-feature mean
  Matrix components;                 // n_components x d, orthonormal rows
  std::vector<double> explained_variance;  // non-increasing
};

struct MinMaxScaler {
  // d feature columns followed by the target column.
  std::vector<double> feature_min;
  std::vector<double> feature_max;

  double target_min() const { return feature_min.back(); }
  double target_max() const { return feature_max.back(); }
  double target_range() const { return target_max() - target_min(); }
};

struct PreprocessorState {
  PreprocessMode mode = PreprocessMode::none;
  std::optional<PcaModel> pca;
  std::optional<MinMaxScaler> scaler;

  nlohmann::json to_json() const;
  static PreprocessorState from_json(const nlohmann::json& j);
};

/// PCA of the training features: centering only, principal directions from
/// a Jacobi eigendecomposition of the sample covariance.
PcaModel pca_fit(const Matrix& train_features, std::size_t n_components = 20);

/// Projects rows onto the fitted components: (x - mean) * components^T.
Matrix pca_transform(const PcaModel& model, const Matrix& features);

/// Back-projection scores * components + mean (full-rank reconstruction check).
Matrix pca_inverse_transform(const PcaModel& model, const Matrix& scores);

/// Per-column extrema over features and targets stacked as one table.
MinMaxScaler minmax_fit(const Matrix& train_features, const std::vector<double>& train_targets);

/// (x - min) / (max - min) per column; constant columns map to 0.
/// Values outside the fitted range are not clipped.
Matrix minmax_transform_features(const MinMaxScaler& scaler, const Matrix& features);
std::vector<double> minmax_transform_targets(const MinMaxScaler& scaler,
                                             const std::vector<double>& targets);

std::vector<double> minmax_inverse_targets(const MinMaxScaler& scaler,
                                           const std::vector<double>& scaled_targets);

Matrix minmax_inverse_features(const MinMaxScaler& scaler, const Matrix& scaled);

struct PreprocessedData {
  PreprocessorState state;
  Matrix train_features;
  std::vector<double> train_targets;
  Matrix test_features;
  std::vector<double> test_targets;
};

/// Runs the selected preprocessing step. All statistics come from the
/// training subset; the same transform is then applied to both subsets.
/// PCA leaves targets untouched; scaling transforms features and targets.
PreprocessedData apply_preprocessing(PreprocessMode mode, const Matrix& train_features,
                                     const std::vector<double>& train_targets,
                                     const Matrix& test_features,
                                     const std::vector<double>& test_targets,
                                     std::size_t pca_components = 20);

/// Applies an already-fitted state to new data (model-space features).
Matrix transform_features(const PreprocessorState& state, const Matrix& features);
std::vector<double> transform_targets(const PreprocessorState& state,
                                      const std::vector<double>& targets);

}  // namespace soilspec
