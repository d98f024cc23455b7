#include "soilspec/linear.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "soilspec/error.hpp"

namespace soilspec {

LinearRegressor::LinearRegressor(const HyperparameterSet& hp) : hp_(hp) {
  require(hp.kind() == "linear", "LinearRegressor: wrong hyperparameter kind");
}

void LinearRegressor::fit(const Matrix& x, const std::vector<double>& y) {
  check_fit_inputs(x, y);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j)
      require(std::isfinite(x(i, j)), "fit_linear: non-finite feature value");
    require(std::isfinite(y[i]), "fit_linear: non-finite target value");
  }

  // Augment with a constant column for the intercept.
  Matrix design(x.rows(), x.cols() + 1);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) design(i, j) = x(i, j);
    design(i, x.cols()) = 1.0;
  }
  std::vector<double> sol = solve_least_squares(design, y);
  weights_.assign(sol.begin(), sol.end() - 1);
  intercept_ = sol.back();
}

std::vector<double> LinearRegressor::predict(const Matrix& x) const {
  check_predict_input(x);
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double v = intercept_;
    const double* row = x.row(i);
    for (std::size_t j = 0; j < x.cols(); ++j) v += weights_[j] * row[j];
    out[i] = v;
  }
  return out;
}

nlohmann::json LinearRegressor::params_to_json() const {
  return {{"weights", weights_}, {"intercept", intercept_}};
}

void LinearRegressor::params_from_json(const nlohmann::json& j) {
  weights_ = j.at("weights").get<std::vector<double>>();
  intercept_ = j.at("intercept").get<double>();
  fitted_width_ = weights_.size();
}

}  // namespace soilspec
