#include <cmath>
#include <vector>

#include "doctest.h"
#include "soilspec/error.hpp"
#include "soilspec/mlp.hpp"
#include "soilspec/rng.hpp"
#include "support/oracles.hpp"

using namespace soilspec;

namespace {

HyperparameterSet mlp_with(std::vector<double> hidden, double lr, double epochs,
                           double batch = 8.0) {
  return HyperparameterSet::for_kind("mlp", {{"hidden_layers", std::move(hidden)},
                                             {"learning_rate", lr},
                                             {"epochs", epochs},
                                             {"batch_size", batch}});
}

Matrix random_features(std::size_t n, std::size_t d, Rng& rng) {
  Matrix x(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) x(i, j) = rng.uniform(-1.0, 1.0);
  return x;
}

}  // namespace

TEST_CASE("mlp: analytic gradients match central finite differences") {
  Rng rng(81);
  const Matrix x = random_features(5, 3, rng);
  std::vector<double> y(5);
  for (double& v : y) v = rng.uniform(-1.0, 1.0);

  MlpRegressor model(mlp_with({4.0, 3.0}, 1e-3, 1.0), 7);
  model.initialize(3);

  std::vector<MlpRegressor::Layer> grads;
  model.loss_and_gradients(x, y, grads);
  REQUIRE(grads.size() == model.layers().size());

  const double h = 1e-5;
  auto loss_now = [&]() {
    std::vector<MlpRegressor::Layer> scratch;
    return model.loss_and_gradients(x, y, scratch);
  };

  double worst = 0.0;
  for (std::size_t l = 0; l < model.layers().size(); ++l) {
    auto& layer = model.layers()[l];
    for (std::size_t t = 0; t < layer.w.data().size(); ++t) {
      const double numeric = oracles::central_difference(loss_now, layer.w.data()[t], h);
      const double analytic = grads[l].w.data()[t];
      const double rel =
          std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1.0});
      worst = std::max(worst, rel);
    }
    for (std::size_t t = 0; t < layer.b.size(); ++t) {
      const double numeric = oracles::central_difference(loss_now, layer.b[t], h);
      const double analytic = grads[l].b[t];
      const double rel =
          std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1.0});
      worst = std::max(worst, rel);
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("mlp: initialization draws from the fan-in uniform range, biases zero") {
  MlpRegressor model(mlp_with({8.0}, 1e-3, 1.0), 3);
  model.initialize(16);
  REQUIRE(model.layers().size() == 2);

  const double bound0 = 1.0 / std::sqrt(16.0);
  const auto& l0 = model.layers()[0];
  CHECK(l0.w.rows() == 8);
  CHECK(l0.w.cols() == 16);
  bool nonzero = false;
  for (double v : l0.w.data()) {
    CHECK(v >= -bound0);
    CHECK(v <= bound0);
    nonzero = nonzero || v != 0.0;
  }
  CHECK(nonzero);
  for (double v : l0.b) CHECK(v == 0.0);

  const auto& l1 = model.layers()[1];
  CHECK(l1.w.rows() == 1);
  CHECK(l1.w.cols() == 8);
}

TEST_CASE("mlp: same seed gives identical fits, different seeds differ") {
  Rng rng(82);
  const Matrix x = random_features(30, 4, rng);
  std::vector<double> y(30);
  for (std::size_t i = 0; i < 30; ++i) y[i] = x(i, 0) - 0.5 * x(i, 2);

  MlpRegressor a(mlp_with({8.0}, 1e-3, 5.0), 11);
  MlpRegressor b(mlp_with({8.0}, 1e-3, 5.0), 11);
  MlpRegressor c(mlp_with({8.0}, 1e-3, 5.0), 12);
  a.fit(x, y);
  b.fit(x, y);
  c.fit(x, y);
  CHECK(a.predict(x) == b.predict(x));
  CHECK(a.predict(x) != c.predict(x));
}

TEST_CASE("mlp: training reduces the loss on a learnable function") {
  Rng rng(83);
  const Matrix x = random_features(60, 3, rng);
  std::vector<double> y(60);
  for (std::size_t i = 0; i < 60; ++i) y[i] = 2.0 * x(i, 0) + x(i, 1);

  MlpRegressor model(mlp_with({16.0, 8.0}, 1e-2, 60.0), 5);
  model.initialize(3);
  std::vector<MlpRegressor::Layer> scratch;
  const double before = model.loss_and_gradients(x, y, scratch);
  model.fit(x, y);
  const double after = model.loss_and_gradients(x, y, scratch);
  CHECK(after < 0.2 * before);
}

TEST_CASE("mlp: overflowing loss raises a diagnostic error") {
  Rng rng(84);
  Matrix x = random_features(20, 2, rng);
  for (double& v : x.data()) v *= 1e200;  // squared error overflows on batch one
  std::vector<double> y(20);
  for (double& v : y) v = rng.uniform(100.0, 200.0);

  MlpRegressor model(mlp_with({8.0}, 1e-3, 30.0), 4);
  CHECK_THROWS_AS(model.fit(x, y), Error);
}

TEST_CASE("mlp: fitted parameters survive the json round trip") {
  Rng rng(85);
  const Matrix x = random_features(15, 3, rng);
  std::vector<double> y(15);
  for (std::size_t i = 0; i < 15; ++i) y[i] = x(i, 1);

  MlpRegressor model(mlp_with({6.0}, 1e-3, 3.0), 2);
  model.fit(x, y);
  MlpRegressor loaded(mlp_with({6.0}, 1e-3, 3.0), 99);
  loaded.params_from_json(model.params_to_json());
  CHECK(loaded.predict(x) == model.predict(x));
}

TEST_CASE("mlp: hyperparameter validation") {
  CHECK_THROWS_AS(HyperparameterSet::for_kind("mlp", {{"epochs", 0.0}}), Error);
  CHECK_THROWS_AS(HyperparameterSet::for_kind("mlp", {{"batch_size", 0.0}}), Error);
  CHECK_THROWS_AS(HyperparameterSet::for_kind("mlp", {{"hidden_layers", std::vector<double>{}}}),
                  Error);
}
