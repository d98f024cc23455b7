#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "soilspec/error.hpp"
#include "soilspec/rng.hpp"
#include "soilspec/svr.hpp"
#include "support/oracles.hpp"

using namespace soilspec;

namespace {

HyperparameterSet svr_with(double c, double gamma, double eps, double tol = 1e-3,
                           double max_iter = 1e7) {
  return HyperparameterSet::for_kind("svr", {{"C", c},
                                             {"gamma", gamma},
                                             {"epsilon", eps},
                                             {"tol", tol},
                                             {"max_iter", max_iter}});
}

Matrix sine_features(std::size_t n, std::vector<double>& y, Rng& rng) {
  Matrix x(n, 1);
  y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = rng.uniform(0.0, 6.0);
    y[i] = std::sin(x(i, 0)) + 0.05 * rng.normal();
  }
  return x;
}

}  // namespace

TEST_CASE("svr: solution satisfies the dual optimality system") {
  Rng rng(71);
  std::vector<double> y;
  const Matrix x = sine_features(40, y, rng);
  const double c = 10.0, gamma = 0.5, eps = 0.1, tol = 1e-3;

  SvrRegressor model(svr_with(c, gamma, eps, tol));
  model.fit(x, y);
  REQUIRE(model.converged());

  const std::vector<double>& theta = model.training_dual_coefficients();
  REQUIRE(theta.size() == 40);

  // Feasibility: the box and the equality constraint.
  double sum = 0.0;
  for (double t : theta) {
    CHECK(t <= c + 1e-12);
    CHECK(t >= -c - 1e-12);
    sum += t;
  }
  CHECK(std::abs(sum) < 1e-9 * c);

  // From-scratch KKT residuals within the optimizer's stopping tolerance.
  const Matrix kernel = oracles::rbf_kernel(x, gamma);
  const double violation =
      oracles::svr_kkt_violation(kernel, y, theta, model.bias(), c, eps);
  CHECK(violation <= tol + 1e-9);

  // Convexity: no feasible pair move may improve the dual objective by more
  // than the slack the stopping rule allows.
  const double improvement =
      oracles::svr_best_feasible_improvement(kernel, y, theta, c, eps, 4000, 123);
  CHECK(improvement <= 2.0 * c * tol + 1e-9);
}

TEST_CASE("svr: training residuals respect the epsilon tube for interior points") {
  Rng rng(72);
  std::vector<double> y;
  const Matrix x = sine_features(30, y, rng);
  const double c = 50.0, eps = 0.15;

  SvrRegressor model(svr_with(c, 1.0, eps));
  model.fit(x, y);
  const std::vector<double> pred = model.predict(x);
  const std::vector<double>& theta = model.training_dual_coefficients();
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (std::abs(theta[i]) >= c - 1e-9) continue;  // at the box; may overshoot
    CHECK(std::abs(pred[i] - y[i]) <= eps + 1e-2);
  }
}

TEST_CASE("svr: a flat function inside the tube needs no support vectors") {
  Matrix x(6, 1);
  std::vector<double> y(6);
  for (std::size_t i = 0; i < 6; ++i) {
    x(i, 0) = static_cast<double>(i);
    y[i] = 5.0 + 0.01 * (i % 2 ? 1.0 : -1.0);  // well inside eps = 0.1
  }
  SvrRegressor model(svr_with(10.0, 0.5, 0.1));
  model.fit(x, y);
  const std::vector<double>& theta = model.training_dual_coefficients();
  CHECK(oracles::max_abs(theta) == 0.0);
  // Prediction falls back to the bias, centered within the tube.
  const std::vector<double> pred = model.predict(x);
  for (double p : pred) CHECK(p == doctest::Approx(5.0).epsilon(0.02));
}

TEST_CASE("svr: iteration cap reports non-convergence but keeps the iterate") {
  Rng rng(73);
  std::vector<double> y;
  const Matrix x = sine_features(50, y, rng);
  SvrRegressor model(svr_with(10.0, 0.5, 0.01, 1e-6, 3.0));
  model.fit(x, y);  // warns on stderr
  CHECK(!model.converged());
  CHECK(model.predict(x).size() == 50);
}

TEST_CASE("svr: duplicate-row kernel stays solvable") {
  Matrix x(4, 1);
  x(0, 0) = 1.0;
  x(1, 0) = 1.0;
  x(2, 0) = 2.0;
  x(3, 0) = 3.0;
  SvrRegressor model(svr_with(5.0, 1.0, 0.05));
  model.fit(x, {1.0, 1.0, 2.0, 3.0});
  CHECK(model.converged());
  const std::vector<double> pred = model.predict(x);
  CHECK(pred[0] == doctest::Approx(pred[1]).epsilon(1e-12));
}

TEST_CASE("svr: fitted parameters survive the json round trip") {
  Rng rng(74);
  std::vector<double> y;
  const Matrix x = sine_features(20, y, rng);
  SvrRegressor model(svr_with(10.0, 0.5, 0.1));
  model.fit(x, y);

  SvrRegressor loaded(svr_with(10.0, 0.5, 0.1));
  loaded.params_from_json(model.params_to_json());
  CHECK(loaded.predict(x) == model.predict(x));
  CHECK(loaded.training_dual_coefficients().empty());
}

TEST_CASE("svr: hyperparameter validation") {
  CHECK_THROWS_AS(HyperparameterSet::for_kind("svr", {{"C", 0.0}}), Error);
  CHECK_THROWS_AS(HyperparameterSet::for_kind("svr", {{"gamma", -1.0}}), Error);
  CHECK_THROWS_AS(HyperparameterSet::for_kind("svr", {{"epsilon", -0.1}}), Error);
}
