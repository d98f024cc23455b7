#include "soilspec/svr.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include <nlohmann/json.hpp>

#include "soilspec/error.hpp"

namespace soilspec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTau = 1e-12;

}  // namespace

SvrRegressor::SvrRegressor(const HyperparameterSet& hp)
    : hp_(hp), support_vectors_(0, 0) {
  require(hp.kind() == "svr", "SvrRegressor: wrong hyperparameter kind");
}

void SvrRegressor::fit(const Matrix& x, const std::vector<double>& y) {
  check_fit_inputs(x, y);
  const std::size_t n = x.rows();
  require(n >= 2, "fit_svr: needs at least 2 samples");
  const double c = hp_.get_double("C");
  const double gamma = hp_.get_double("gamma");
  const double eps = hp_.get_double("epsilon");
  const double tol = hp_.get_double("tol");
  const long max_iter = hp_.get_int("max_iter");

  Matrix kernel(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    kernel(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double k = std::exp(-gamma * squared_distance(x.row(i), x.row(j), x.cols()));
      kernel(i, j) = k;
      kernel(j, i) = k;
    }
  }

  // Dual variables: beta[0..n) = alpha (label +1), beta[n..2n) = alpha*
  // (label -1); minimize 1/2 b'Qb + p'b with Q_st = z_s z_t K_st subject to
  // z'b = 0 and 0 <= b <= C.
  const std::size_t m = 2 * n;
  std::vector<double> beta(m, 0.0);
  std::vector<double> grad(m);
  std::vector<signed char> z(m);
  for (std::size_t t = 0; t < n; ++t) {
    grad[t] = eps - y[t];
    z[t] = +1;
    grad[t + n] = eps + y[t];
    z[t + n] = -1;
  }
  auto q = [&](std::size_t s, std::size_t t) {
    return static_cast<double>(z[s]) * static_cast<double>(z[t]) * kernel(s % n, t % n);
  };

  converged_ = false;
  long iter = 0;
  for (; iter < max_iter; ++iter) {
    // Maximal violating pair.
    double gmax = -kInf, gmin = kInf;
    std::size_t i = m, j = m;
    for (std::size_t t = 0; t < m; ++t) {
      const double v = -static_cast<double>(z[t]) * grad[t];
      const bool in_up = (z[t] > 0) ? (beta[t] < c) : (beta[t] > 0.0);
      const bool in_low = (z[t] > 0) ? (beta[t] > 0.0) : (beta[t] < c);
      if (in_up && v > gmax) {
        gmax = v;
        i = t;
      }
      if (in_low && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    if (i == m || j == m || gmax - gmin <= tol) {
      converged_ = true;
      break;
    }

    const double old_i = beta[i], old_j = beta[j];
    if (z[i] != z[j]) {
      double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = beta[i] - beta[j];
      beta[i] += delta;
      beta[j] += delta;
      if (diff > 0.0) {
        if (beta[j] < 0.0) {
          beta[j] = 0.0;
          beta[i] = diff;
        }
      } else {
        if (beta[i] < 0.0) {
          beta[i] = 0.0;
          beta[j] = -diff;
        }
      }
      if (diff > 0.0) {
        if (beta[i] > c) {
          beta[i] = c;
          beta[j] = c - diff;
        }
      } else {
        if (beta[j] > c) {
          beta[j] = c;
          beta[i] = c + diff;
        }
      }
    } else {
      double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = beta[i] + beta[j];
      beta[i] -= delta;
      beta[j] += delta;
      if (sum > c) {
        if (beta[i] > c) {
          beta[i] = c;
          beta[j] = sum - c;
        }
        if (beta[j] > c) {
          beta[j] = c;
          beta[i] = sum - c;
        }
      } else {
        if (beta[j] < 0.0) {
          beta[j] = 0.0;
          beta[i] = sum;
        }
        if (beta[i] < 0.0) {
          beta[i] = 0.0;
          beta[j] = sum;
        }
      }
    }

    const double di = beta[i] - old_i;
    const double dj = beta[j] - old_j;
    if (di == 0.0 && dj == 0.0) {
      converged_ = true;  // numerically stuck at the boundary of feasibility
      break;
    }
    for (std::size_t t = 0; t < m; ++t) grad[t] += q(t, i) * di + q(t, j) * dj;
  }
  if (!converged_)
    std::cerr << "svr: optimizer hit the iteration cap (" << max_iter
              << ") before reaching KKT tolerance; returning best iterate\n";

  // rho from the KKT conditions; decision bias is its negation.
  double ub = kInf, lb = -kInf, sum_free = 0.0;
  std::size_t nr_free = 0;
  for (std::size_t t = 0; t < m; ++t) {
    const double yg = static_cast<double>(z[t]) * grad[t];
    if (beta[t] >= c) {
      if (z[t] < 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else if (beta[t] <= 0.0) {
      if (z[t] > 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else {
      ++nr_free;
      sum_free += yg;
    }
  }
  const double rho = nr_free > 0 ? sum_free / static_cast<double>(nr_free) : (ub + lb) / 2.0;
  bias_ = -rho;

  full_coef_.assign(n, 0.0);
  std::size_t n_sv = 0;
  for (std::size_t t = 0; t < n; ++t) {
    full_coef_[t] = beta[t] - beta[t + n];
    if (full_coef_[t] != 0.0) ++n_sv;
  }
  support_vectors_ = Matrix(n_sv, x.cols());
  coef_.clear();
  coef_.reserve(n_sv);
  std::size_t r = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (full_coef_[t] == 0.0) continue;
    for (std::size_t cidx = 0; cidx < x.cols(); ++cidx) support_vectors_(r, cidx) = x(t, cidx);
    coef_.push_back(full_coef_[t]);
    ++r;
  }
}

std::vector<double> SvrRegressor::predict(const Matrix& x) const {
  check_predict_input(x);
  const double gamma = hp_.get_double("gamma");
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double f = bias_;
    for (std::size_t s = 0; s < support_vectors_.rows(); ++s)
      f += coef_[s] *
           std::exp(-gamma * squared_distance(support_vectors_.row(s), x.row(i), x.cols()));
    out[i] = f;
  }
  return out;
}

nlohmann::json SvrRegressor::params_to_json() const {
  std::vector<std::vector<double>> sv(support_vectors_.rows());
  for (std::size_t i = 0; i < support_vectors_.rows(); ++i)
    sv[i].assign(support_vectors_.row(i), support_vectors_.row(i) + support_vectors_.cols());
  return {{"support_vectors", sv},
          {"dual_coef", coef_},
          {"bias", bias_},
          {"n_features", fitted_width_}};
}

void SvrRegressor::params_from_json(const nlohmann::json& j) {
  auto sv = j.at("support_vectors").get<std::vector<std::vector<double>>>();
  fitted_width_ = j.at("n_features").get<std::size_t>();
  support_vectors_ = Matrix(sv.size(), fitted_width_);
  for (std::size_t i = 0; i < sv.size(); ++i) {
    require(sv[i].size() == fitted_width_, "svr: ragged stored support vectors");
    for (std::size_t c = 0; c < fitted_width_; ++c) support_vectors_(i, c) = sv[i][c];
  }
  coef_ = j.at("dual_coef").get<std::vector<double>>();
  require(coef_.size() == sv.size(), "svr: coefficient count mismatch");
  bias_ = j.at("bias").get<double>();
  full_coef_.clear();
  converged_ = true;
}

}  // namespace soilspec
