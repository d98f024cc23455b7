#include "soilspec/pls.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include <nlohmann/json.hpp>

#include "soilspec/error.hpp"

namespace soilspec {

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

PlsRegressor::PlsRegressor(const HyperparameterSet& hp) : hp_(hp) {
  require(hp.kind() == "pls", "PlsRegressor: wrong hyperparameter kind");
}

void PlsRegressor::fit(const Matrix& x, const std::vector<double>& y) {
  check_fit_inputs(x, y);
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  require(n >= 2, "fit_pls: needs at least 2 samples");

  std::size_t budget = static_cast<std::size_t>(hp_.get_int("n_components"));
  const std::size_t rank_cap = std::min(n - 1, d);
  if (budget > rank_cap) {
    std::cerr << "pls: n_components " << budget << " exceeds min(n-1, d) = " << rank_cap
              << ", truncating\n";
    budget = rank_cap;
  }
  const long max_iter = hp_.get_int("max_iter");
  const double tol = hp_.get_double("tol");

  x_mean_ = column_means(x);
  y_mean_ = 0.0;
  for (double v : y) y_mean_ += v;
  y_mean_ /= static_cast<double>(n);

  Matrix e = x;  // deflated copy
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) e(i, j) -= x_mean_[j];
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = y[i] - y_mean_;

  x_weights_.clear();
  x_loadings_.clear();
  y_loadings_.clear();

  std::vector<double> w(d), t(n), t_old(n);
  for (std::size_t a = 0; a < budget; ++a) {
    std::vector<double> u = f;
    std::fill(t_old.begin(), t_old.end(), 0.0);
    bool degenerate = false;
    for (long it = 0; it < max_iter; ++it) {
      // w = Eᵀu, normalized
      std::fill(w.begin(), w.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double* row = e.row(i);
        const double ui = u[i];
        for (std::size_t j = 0; j < d; ++j) w[j] += row[j] * ui;
      }
      double wn = norm2(w);
      if (wn < 1e-14) {
        degenerate = true;
        break;
      }
      for (double& v : w) v /= wn;

      for (std::size_t i = 0; i < n; ++i) t[i] = dot(e.row(i), w.data(), d);

      double tt = dot(t.data(), t.data(), n);
      if (tt < 1e-14) {
        degenerate = true;
        break;
      }
      double q = dot(f.data(), t.data(), n) / tt;
      if (q == 0.0) {
        degenerate = true;
        break;
      }
      for (std::size_t i = 0; i < n; ++i) u[i] = f[i] * q;

      double diff = 0.0;
      for (std::size_t i = 0; i < n; ++i) diff += (t[i] - t_old[i]) * (t[i] - t_old[i]);
      if (std::sqrt(diff) < tol * std::max(1.0, std::sqrt(tt))) break;
      t_old = t;
    }
    if (degenerate) {
      std::cerr << "pls: residual covariance exhausted after " << a << " components\n";
      break;
    }

    double tt = dot(t.data(), t.data(), n);
    std::vector<double> p(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = e.row(i);
      const double ti = t[i];
      for (std::size_t j = 0; j < d; ++j) p[j] += row[j] * ti;
    }
    for (double& v : p) v /= tt;
    double c = dot(f.data(), t.data(), n) / tt;

    for (std::size_t i = 0; i < n; ++i) {
      double* row = e.row(i);
      const double ti = t[i];
      for (std::size_t j = 0; j < d; ++j) row[j] -= ti * p[j];
      f[i] -= ti * c;
    }

    x_weights_.push_back(w);
    x_loadings_.push_back(std::move(p));
    y_loadings_.push_back(c);
  }
}

std::vector<double> PlsRegressor::predict(const Matrix& x) const {
  check_predict_input(x);
  const std::size_t d = fitted_width_;
  std::vector<double> out(x.rows());
  std::vector<double> e(d);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double* row = x.row(i);
    for (std::size_t j = 0; j < d; ++j) e[j] = row[j] - x_mean_[j];
    double yhat = y_mean_;
    for (std::size_t a = 0; a < x_weights_.size(); ++a) {
      double t = dot(e.data(), x_weights_[a].data(), d);
      const std::vector<double>& p = x_loadings_[a];
      for (std::size_t j = 0; j < d; ++j) e[j] -= t * p[j];
      yhat += t * y_loadings_[a];
    }
    out[i] = yhat;
  }
  return out;
}

nlohmann::json PlsRegressor::params_to_json() const {
  return {{"x_weights", x_weights_}, {"x_loadings", x_loadings_},
          {"y_loadings", y_loadings_}, {"x_mean", x_mean_},
          {"y_mean", y_mean_}};
}

void PlsRegressor::params_from_json(const nlohmann::json& j) {
  x_weights_ = j.at("x_weights").get<std::vector<std::vector<double>>>();
  x_loadings_ = j.at("x_loadings").get<std::vector<std::vector<double>>>();
  y_loadings_ = j.at("y_loadings").get<std::vector<double>>();
  x_mean_ = j.at("x_mean").get<std::vector<double>>();
  y_mean_ = j.at("y_mean").get<double>();
  fitted_width_ = x_mean_.size();
}

}  // namespace soilspec
