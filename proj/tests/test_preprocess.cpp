#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "soilspec/error.hpp"
#include "soilspec/linalg.hpp"
#include "soilspec/preprocess.hpp"
#include "soilspec/rng.hpp"

using namespace soilspec;

namespace {

Matrix random_features(std::size_t n, std::size_t d, Rng& rng) {
  Matrix x(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) x(i, j) = rng.uniform(-3.0, 3.0);
  return x;
}

}  // namespace

TEST_CASE("pca_fit: orthonormal components, non-increasing variance") {
  Rng rng(21);
  const Matrix x = random_features(40, 6, rng);
  const PcaModel model = pca_fit(x, 6);

  for (std::size_t a = 0; a < 6; ++a) {
    for (std::size_t b = 0; b < 6; ++b) {
      const double expected = a == b ? 1.0 : 0.0;
      CHECK(dot(model.components.row(a), model.components.row(b), 6) ==
            doctest::Approx(expected).epsilon(1e-9).scale(1.0));
    }
  }
  for (std::size_t k = 0; k + 1 < 6; ++k)
    CHECK(model.explained_variance[k] >= model.explained_variance[k + 1]);
  for (double v : model.explained_variance) CHECK(v >= 0.0);
}

TEST_CASE("pca: full-rank projection reconstructs the input") {
  Rng rng(22);
  const Matrix x = random_features(30, 5, rng);
  const PcaModel model = pca_fit(x, 5);
  const Matrix scores = pca_transform(model, x);
  const Matrix back = pca_inverse_transform(model, scores);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j)
      CHECK(back(i, j) == doctest::Approx(x(i, j)).epsilon(1e-8).scale(1.0));
}

TEST_CASE("pca: transformed training scores are centered") {
  Rng rng(23);
  const Matrix x = random_features(25, 4, rng);
  const PcaModel model = pca_fit(x, 3);
  const Matrix scores = pca_transform(model, x);
  REQUIRE(scores.cols() == 3);
  const std::vector<double> means = column_means(scores);
  for (double m : means) CHECK(std::abs(m) < 1e-10);
}

TEST_CASE("pca: top component of an elongated cloud points along it") {
  Rng rng(24);
  Matrix x(60, 2);
  for (std::size_t i = 0; i < 60; ++i) {
    const double t = rng.uniform(-5.0, 5.0);
    x(i, 0) = t + 0.01 * rng.normal();
    x(i, 1) = 0.5 * t + 0.01 * rng.normal();
  }
  const PcaModel model = pca_fit(x, 1);
  const double norm = std::sqrt(1.0 + 0.25);
  const double align =
      std::abs(model.components(0, 0) * (1.0 / norm) + model.components(0, 1) * (0.5 / norm));
  CHECK(align == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("pca_fit: input validation") {
  Rng rng(25);
  const Matrix x = random_features(10, 4, rng);
  CHECK_THROWS_AS(pca_fit(x, 0), Error);
  CHECK_THROWS_AS(pca_fit(x, 5), Error);      // more components than features
  CHECK_THROWS_AS(pca_fit(x, 10), Error);     // needs n > n_components
  Matrix bad = x;
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(pca_fit(bad, 2), Error);
}

TEST_CASE("minmax: round trip within 1e-12") {
  Rng rng(26);
  const Matrix x = random_features(20, 3, rng);
  std::vector<double> y(20);
  for (double& v : y) v = rng.uniform(5.0, 30.0);

  const MinMaxScaler scaler = minmax_fit(x, y);
  const Matrix xs = minmax_transform_features(scaler, x);
  const std::vector<double> ys = minmax_transform_targets(scaler, y);

  for (std::size_t i = 0; i < xs.rows(); ++i)
    for (std::size_t j = 0; j < xs.cols(); ++j) {
      CHECK(xs(i, j) >= 0.0);
      CHECK(xs(i, j) <= 1.0);
    }

  const Matrix back = minmax_inverse_features(scaler, xs);
  const std::vector<double> y_back = minmax_inverse_targets(scaler, ys);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    CHECK(std::abs(y_back[i] - y[i]) < 1e-12);
    for (std::size_t j = 0; j < x.cols(); ++j) CHECK(std::abs(back(i, j) - x(i, j)) < 1e-12);
  }
}

TEST_CASE("minmax: constant column maps to zero, outsiders are not clipped") {
  Matrix x(3, 2);
  for (std::size_t i = 0; i < 3; ++i) {
    x(i, 0) = 7.0;  // constant
    x(i, 1) = static_cast<double>(i);
  }
  const MinMaxScaler scaler = minmax_fit(x, {1.0, 2.0, 3.0});
  const Matrix xs = minmax_transform_features(scaler, x);
  for (std::size_t i = 0; i < 3; ++i) CHECK(xs(i, 0) == 0.0);

  Matrix probe(1, 2);
  probe(0, 0) = 7.0;
  probe(0, 1) = 4.0;  // beyond the fitted max of 2
  const Matrix ps = minmax_transform_features(scaler, probe);
  CHECK(ps(0, 1) == doctest::Approx(2.0));
}

TEST_CASE("apply_preprocessing: none is a passthrough") {
  Rng rng(27);
  const Matrix train = random_features(10, 3, rng);
  const Matrix test = random_features(4, 3, rng);
  const std::vector<double> ytr(10, 1.0), yte(4, 2.0);
  const PreprocessedData p =
      apply_preprocessing(PreprocessMode::none, train, ytr, test, yte, 2);
  CHECK(p.train_features.data() == train.data());
  CHECK(p.test_targets == yte);
  CHECK(p.state.mode == PreprocessMode::none);
  CHECK(!p.state.pca.has_value());
  CHECK(!p.state.scaler.has_value());
}

TEST_CASE("apply_preprocessing: pca narrows features, leaves targets alone") {
  Rng rng(28);
  const Matrix train = random_features(30, 8, rng);
  const Matrix test = random_features(6, 8, rng);
  std::vector<double> ytr(30, 0.0), yte(6, 0.0);
  for (double& v : ytr) v = rng.uniform(0.0, 1.0);
  for (double& v : yte) v = rng.uniform(0.0, 1.0);

  const PreprocessedData p =
      apply_preprocessing(PreprocessMode::pca, train, ytr, test, yte, 4);
  CHECK(p.train_features.cols() == 4);
  CHECK(p.test_features.cols() == 4);
  CHECK(p.train_targets == ytr);
  CHECK(p.test_targets == yte);
  REQUIRE(p.state.pca.has_value());

  // Statistics come from the training subset only.
  const Matrix expected = pca_transform(*p.state.pca, test);
  for (std::size_t i = 0; i < test.rows(); ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(p.test_features(i, j) == doctest::Approx(expected(i, j)).epsilon(1e-12).scale(1.0));
}

TEST_CASE("apply_preprocessing: scaling transforms features and targets") {
  Rng rng(29);
  const Matrix train = random_features(15, 3, rng);
  const Matrix test = random_features(5, 3, rng);
  std::vector<double> ytr(15), yte(5);
  for (double& v : ytr) v = rng.uniform(10.0, 20.0);
  for (double& v : yte) v = rng.uniform(10.0, 20.0);

  const PreprocessedData p =
      apply_preprocessing(PreprocessMode::scaling, train, ytr, test, yte, 2);
  REQUIRE(p.state.scaler.has_value());
  for (double v : p.train_targets) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  // Train statistics only: a test target above the train max exceeds 1.
  const std::vector<double> back = minmax_inverse_targets(*p.state.scaler, p.test_targets);
  for (std::size_t i = 0; i < yte.size(); ++i)
    CHECK(back[i] == doctest::Approx(yte[i]).epsilon(1e-12));
}

TEST_CASE("preprocess mode names round trip") {
  CHECK(preprocess_mode_from_string("none") == PreprocessMode::none);
  CHECK(preprocess_mode_from_string("pca") == PreprocessMode::pca);
  CHECK(preprocess_mode_from_string("scaling") == PreprocessMode::scaling);
  CHECK(to_string(PreprocessMode::pca) == "pca");
  CHECK_THROWS_AS(preprocess_mode_from_string("minmax"), Error);
}

TEST_CASE("PreprocessorState: json round trip and consistency checks") {
  Rng rng(30);
  const Matrix train = random_features(12, 3, rng);
  std::vector<double> y(12);
  for (double& v : y) v = rng.uniform(0.0, 9.0);

  PreprocessorState state;
  state.mode = PreprocessMode::scaling;
  state.scaler = minmax_fit(train, y);
  const PreprocessorState loaded = PreprocessorState::from_json(state.to_json());
  CHECK(loaded.mode == PreprocessMode::scaling);
  REQUIRE(loaded.scaler.has_value());
  CHECK(loaded.scaler->feature_min == state.scaler->feature_min);
  CHECK(loaded.scaler->feature_max == state.scaler->feature_max);

  // Mode and payload must agree.
  nlohmann::json j = state.to_json();
  j["mode"] = "pca";
  CHECK_THROWS_AS(PreprocessorState::from_json(j), Error);
}

TEST_CASE("transform_features/transform_targets: follow the fitted state") {
  Rng rng(31);
  const Matrix train = random_features(10, 4, rng);
  std::vector<double> y(10);
  for (double& v : y) v = rng.uniform(1.0, 2.0);

  PreprocessorState none;
  CHECK(transform_features(none, train).data() == train.data());
  CHECK(transform_targets(none, y) == y);

  PreprocessorState scaled;
  scaled.mode = PreprocessMode::scaling;
  scaled.scaler = minmax_fit(train, y);
  const Matrix xs = transform_features(scaled, train);
  CHECK(xs(0, 0) == doctest::Approx(minmax_transform_features(*scaled.scaler, train)(0, 0)));

  PreprocessorState broken;
  broken.mode = PreprocessMode::pca;
  CHECK_THROWS_AS(transform_features(broken, train), Error);
}
