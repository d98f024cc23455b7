#include "soilspec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "soilspec/error.hpp"

namespace soilspec {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return dot(a.data(), b.data(), a.size());
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
  require(x.size() == a.cols(), "matvec: dimension mismatch");
  std::vector<double> out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* r = a.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += r[j] * x[j];
    out[i] = s;
  }
  return out;
}

std::vector<double> column_means(const Matrix& a) {
  std::vector<double> mean(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) mean[j] += r[j];
  }
  for (auto& m : mean) m /= static_cast<double>(a.rows());
  return mean;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) s += a(i, j) * a(i, j);
  return std::sqrt(2.0 * s);
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

void fix_sign(double* v, std::size_t n) {
  std::size_t imax = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (std::fabs(v[i]) > std::fabs(v[imax])) imax = i;
  if (v[imax] < 0.0)
    for (std::size_t i = 0; i < n; ++i) v[i] = -v[i];
}

}  // namespace

EigenDecomposition eigh_jacobi(const Matrix& a, double tol) {
  require(a.rows() == a.cols(), "eigh_jacobi: matrix must be square");
  const std::size_t n = a.rows();
  Matrix w = a;
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  const double scale = frobenius_norm(a);
  const double threshold = scale > 0.0 ? tol * scale : 0.0;

  for (int sweep = 0; sweep < 64; ++sweep) {
    if (off_diagonal_norm(w) <= threshold) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = w(p, q);
        if (apq == 0.0) continue;
        double app = w(p, p);
        double aqq = w(q, q);
        double tau = (aqq - app) / (2.0 * apq);
        double t = (tau >= 0.0 ? 1.0 : -1.0) /
                   (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          double wkp = w(k, p);
          double wkq = w(k, q);
          w(k, p) = c * wkp - s * wkq;
          w(k, q) = s * wkp + c * wkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double wpk = w(p, k);
          double wqk = w(q, k);
          w(p, k) = c * wpk - s * wqk;
          w(q, k) = s * wpk + c * wqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double vkp = v(k, p);
          double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return w(i, i) > w(j, j); });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t src = order[r];
    out.values[r] = w(src, src);
    for (std::size_t k = 0; k < n; ++k) out.vectors(r, k) = v(k, src);
    fix_sign(out.vectors.row(r), n);
  }
  return out;
}

std::vector<double> solve_least_squares(const Matrix& a, const std::vector<double>& b,
                                        double rcond) {
  require(b.size() == a.rows(), "solve_least_squares: rhs length mismatch");
  const std::size_t n = a.rows();
  const std::size_t d = a.cols();

  // One-sided Jacobi (Hestenes): rotate column pairs of u = a * v until
  // mutually orthogonal; column norms become the singular values.
  Matrix u = a;
  Matrix v(d, d);
  for (std::size_t i = 0; i < d; ++i) v(i, i) = 1.0;

  const double eps = 1e-15;
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          double up = u(i, p), uq = u(i, q);
          alpha += up * up;
          beta += uq * uq;
          gamma += up * uq;
        }
        if (std::fabs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        double zeta = (beta - alpha) / (2.0 * gamma);
        double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                   (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          double up = u(i, p), uq = u(i, q);
          u(i, p) = c * up - s * uq;
          u(i, q) = s * up + c * uq;
        }
        for (std::size_t i = 0; i < d; ++i) {
          double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += u(i, j) * u(i, j);
    sigma[j] = std::sqrt(s);
  }
  double sigma_max = 0.0;
  for (double s : sigma) sigma_max = std::max(sigma_max, s);
  const double cutoff = sigma_max * rcond;

  // x = v * diag(1/sigma) * u^T b over columns above the rank cutoff.
  std::vector<double> x(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    if (sigma[j] <= cutoff || sigma[j] == 0.0) continue;
    double utb = 0.0;
    for (std::size_t i = 0; i < n; ++i) utb += u(i, j) * b[i];
    double coef = utb / (sigma[j] * sigma[j]);
    for (std::size_t k = 0; k < d; ++k) x[k] += coef * v(k, j);
  }
  return x;
}

}  // namespace soilspec
