#pragma once

#include <cstddef>
#include <vector>

namespace soilspec {

/// Dense row-major matrix of doubles.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct EigenDecomposition {
  std::vector<double> values;  // descending
  Matrix vectors;              // one eigenvector per row, aligned with values
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
/// Sweeps until the off-diagonal Frobenius norm falls below tol relative to
/// the matrix norm. Each eigenvector is sign-fixed so that its
/// largest-magnitude entry is positive.
EigenDecomposition eigh_jacobi(const Matrix& a, double tol = 1e-10);

/// Minimum-norm least-squares solution of a x = b via one-sided Jacobi SVD.
/// Rank-revealing: singular values below rcond * sigma_max are dropped.
std::vector<double> solve_least_squares(const Matrix& a, const std::vector<double>& b,
                                        double rcond = 1e-12);

std::vector<double> matvec(const Matrix& a, const std::vector<double>& x);

/// Column means of a.
std::vector<double> column_means(const Matrix& a);

double dot(const std::vector<double>& a, const std::vector<double>& b);
double dot(const double* a, const double* b, std::size_t n);

double squared_distance(const double* a, const double* b, std::size_t n);

}  // namespace soilspec
