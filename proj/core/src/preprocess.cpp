#include "soilspec/preprocess.hpp"

#include <cmath>

#include "soilspec/error.hpp"

namespace soilspec {

PreprocessMode preprocess_mode_from_string(const std::string& name) {
  if (name == "none") return PreprocessMode::none;
  if (name == "pca") return PreprocessMode::pca;
  if (name == "scaling") return PreprocessMode::scaling;
  throw Error("unknown preprocessing mode '" + name + "' (expected none, pca or scaling)");
}

std::string to_string(PreprocessMode mode) {
  switch (mode) {
    case PreprocessMode::none: return "none";
    case PreprocessMode::pca: return "pca";
    case PreprocessMode::scaling: return "scaling";
  }
  return "none";
}

namespace {

void require_finite(const Matrix& m, const std::string& what) {
  for (double v : m.data())
    require(std::isfinite(v), what + ": non-finite value in input");
}

}  // namespace

PcaModel pca_fit(const Matrix& train_features, std::size_t n_components) {
  const std::size_t n = train_features.rows();
  const std::size_t d = train_features.cols();
  require(n_components >= 1, "pca_fit: n_components must be >= 1");
  require(n > n_components, "pca_fit: need more samples than components");
  require(n_components <= d, "pca_fit: n_components exceeds feature count");
  require_finite(train_features, "pca_fit");

  PcaModel model;
  model.mean = column_means(train_features);

  Matrix cov(d, d);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = train_features.row(i);
    for (std::size_t a = 0; a < d; ++a) {
      double xa = row[a] - model.mean[a];
      for (std::size_t b = a; b < d; ++b) cov(a, b) += xa * (row[b] - model.mean[b]);
    }
  }
  const double denom = static_cast<double>(n - 1);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      cov(a, b) /= denom;
      cov(b, a) = cov(a, b);
    }

  EigenDecomposition eig = eigh_jacobi(cov, 1e-10);
  model.components = Matrix(n_components, d);
  model.explained_variance.resize(n_components);
  for (std::size_t k = 0; k < n_components; ++k) {
    model.explained_variance[k] = std::max(0.0, eig.values[k]);
    for (std::size_t j = 0; j < d; ++j) model.components(k, j) = eig.vectors(k, j);
  }
  return model;
}

Matrix pca_transform(const PcaModel& model, const Matrix& features) {
  const std::size_t d = model.mean.size();
  require(features.cols() == d, "pca_transform: feature width mismatch");
  const std::size_t k = model.components.rows();
  Matrix out(features.rows(), k);
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const double* row = features.row(i);
    for (std::size_t c = 0; c < k; ++c) {
      const double* comp = model.components.row(c);
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += (row[j] - model.mean[j]) * comp[j];
      out(i, c) = s;
    }
  }
  return out;
}

Matrix pca_inverse_transform(const PcaModel& model, const Matrix& scores) {
  const std::size_t k = model.components.rows();
  const std::size_t d = model.mean.size();
  require(scores.cols() == k, "pca_inverse_transform: score width mismatch");
  Matrix out(scores.rows(), d);
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    double* row = out.row(i);
    for (std::size_t j = 0; j < d; ++j) row[j] = model.mean[j];
    for (std::size_t c = 0; c < k; ++c) {
      double t = scores(i, c);
      const double* comp = model.components.row(c);
      for (std::size_t j = 0; j < d; ++j) row[j] += t * comp[j];
    }
  }
  return out;
}

MinMaxScaler minmax_fit(const Matrix& train_features, const std::vector<double>& train_targets) {
  const std::size_t n = train_features.rows();
  require(n >= 1, "minmax_fit: empty input");
  require(train_targets.size() == n, "minmax_fit: target length mismatch");
  require_finite(train_features, "minmax_fit");
  const std::size_t d = train_features.cols();

  MinMaxScaler s;
  s.feature_min.assign(d + 1, 0.0);
  s.feature_max.assign(d + 1, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double lo = train_features(0, j), hi = lo;
    for (std::size_t i = 1; i < n; ++i) {
      double v = train_features(i, j);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    s.feature_min[j] = lo;
    s.feature_max[j] = hi;
  }
  double lo = train_targets[0], hi = lo;
  for (double v : train_targets) {
    require(std::isfinite(v), "minmax_fit: non-finite target");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  s.feature_min[d] = lo;
  s.feature_max[d] = hi;
  return s;
}

namespace {

double scale_value(double v, double lo, double hi) {
  if (hi == lo) return 0.0;  // constant column rule
  return (v - lo) / (hi - lo);
}

}  // namespace

Matrix minmax_transform_features(const MinMaxScaler& scaler, const Matrix& features) {
  const std::size_t d = scaler.feature_min.size() - 1;
  require(features.cols() == d, "minmax_transform: feature width mismatch");
  Matrix out(features.rows(), d);
  for (std::size_t i = 0; i < features.rows(); ++i)
    for (std::size_t j = 0; j < d; ++j)
      out(i, j) = scale_value(features(i, j), scaler.feature_min[j], scaler.feature_max[j]);
  return out;
}

std::vector<double> minmax_transform_targets(const MinMaxScaler& scaler,
                                             const std::vector<double>& targets) {
  std::vector<double> out(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i)
    out[i] = scale_value(targets[i], scaler.target_min(), scaler.target_max());
  return out;
}

std::vector<double> minmax_inverse_targets(const MinMaxScaler& scaler,
                                           const std::vector<double>& scaled_targets) {
  require(scaler.target_range() > 0.0,
          "minmax_inverse_targets: degenerate target column (max == min)");
  std::vector<double> out(scaled_targets.size());
  for (std::size_t i = 0; i < scaled_targets.size(); ++i)
    out[i] = scaled_targets[i] * scaler.target_range() + scaler.target_min();
  return out;
}

Matrix minmax_inverse_features(const MinMaxScaler& scaler, const Matrix& scaled) {
  const std::size_t d = scaler.feature_min.size() - 1;
  require(scaled.cols() == d, "minmax_inverse_features: width mismatch");
  Matrix out(scaled.rows(), d);
  for (std::size_t i = 0; i < scaled.rows(); ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double range = scaler.feature_max[j] - scaler.feature_min[j];
      out(i, j) = scaled(i, j) * range + scaler.feature_min[j];
    }
  return out;
}

PreprocessedData apply_preprocessing(PreprocessMode mode, const Matrix& train_features,
                                     const std::vector<double>& train_targets,
                                     const Matrix& test_features,
                                     const std::vector<double>& test_targets,
                                     std::size_t pca_components) {
  PreprocessedData out;
  out.state.mode = mode;
  switch (mode) {
    case PreprocessMode::none:
      out.train_features = train_features;
      out.train_targets = train_targets;
      out.test_features = test_features;
      out.test_targets = test_targets;
      break;
    case PreprocessMode::pca: {
      PcaModel pca = pca_fit(train_features, pca_components);
      out.train_features = pca_transform(pca, train_features);
      out.test_features = pca_transform(pca, test_features);
      out.train_targets = train_targets;
      out.test_targets = test_targets;
      out.state.pca = std::move(pca);
      break;
    }
    case PreprocessMode::scaling: {
      MinMaxScaler scaler = minmax_fit(train_features, train_targets);
      out.train_features = minmax_transform_features(scaler, train_features);
      out.test_features = minmax_transform_features(scaler, test_features);
      out.train_targets = minmax_transform_targets(scaler, train_targets);
      out.test_targets = minmax_transform_targets(scaler, test_targets);
      out.state.scaler = std::move(scaler);
      break;
    }
  }
  return out;
}

Matrix transform_features(const PreprocessorState& state, const Matrix& features) {
  switch (state.mode) {
    case PreprocessMode::none:
      return features;
    case PreprocessMode::pca:
      require(state.pca.has_value(), "transform_features: missing fitted pca model");
      return pca_transform(*state.pca, features);
    case PreprocessMode::scaling:
      require(state.scaler.has_value(), "transform_features: missing fitted scaler");
      return minmax_transform_features(*state.scaler, features);
  }
  throw Error("transform_features: unknown mode");
}

std::vector<double> transform_targets(const PreprocessorState& state,
                                      const std::vector<double>& targets) {
  if (state.mode != PreprocessMode::scaling) return targets;
  require(state.scaler.has_value(), "transform_targets: missing fitted scaler");
  return minmax_transform_targets(*state.scaler, targets);
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  auto data = j.at("data").get<std::vector<double>>();
  require(data.size() == m.rows() * m.cols(), "matrix_from_json: size mismatch");
  m.data() = std::move(data);
  return m;
}

}  // namespace

nlohmann::json PreprocessorState::to_json() const {
  nlohmann::json j;
  j["mode"] = to_string(mode);
  if (pca) {
    j["pca"] = {{"mean", pca->mean},
                {"components", matrix_to_json(pca->components)},
                {"explained_variance", pca->explained_variance}};
  }
  if (scaler) {
    j["scaler"] = {{"feature_min", scaler->feature_min}, {"feature_max", scaler->feature_max}};
  }
  return j;
}

PreprocessorState PreprocessorState::from_json(const nlohmann::json& j) {
  PreprocessorState s;
  s.mode = preprocess_mode_from_string(j.at("mode").get<std::string>());
  if (j.contains("pca")) {
    PcaModel pca;
    pca.mean = j["pca"].at("mean").get<std::vector<double>>();
    pca.components = matrix_from_json(j["pca"].at("components"));
    pca.explained_variance = j["pca"].at("explained_variance").get<std::vector<double>>();
    s.pca = std::move(pca);
  }
  if (j.contains("scaler")) {
    MinMaxScaler sc;
    sc.feature_min = j["scaler"].at("feature_min").get<std::vector<double>>();
    sc.feature_max = j["scaler"].at("feature_max").get<std::vector<double>>();
    s.scaler = std::move(sc);
  }
  require((s.mode == PreprocessMode::pca) == s.pca.has_value(),
          "preprocessor state: pca model presence does not match mode");
  require((s.mode == PreprocessMode::scaling) == s.scaler.has_value(),
          "preprocessor state: scaler presence does not match mode");
  return s;
}

}  // namespace soilspec
