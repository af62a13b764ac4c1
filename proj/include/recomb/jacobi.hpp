#pragma once

#include <cstddef>
#include <vector>

namespace recomb {

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  const std::vector<double>& data() const { return data_; }

  Matrix transpose() const;
  Matrix operator*(const Matrix& o) const;
  std::vector<double> operator*(const std::vector<double>& v) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct EigenDecomposition {
  /// Sorted in decreasing order.
  std::vector<double> values;
  /// Column k is the unit eigenvector for values[k].
  Matrix vectors;
  int sweeps = 0;
};

/// Cyclic Jacobi rotations on a symmetric matrix. Stops once the off-diagonal
/// Frobenius norm is below tolerance * max(1, ||A||_F).
EigenDecomposition jacobi_eigen(const Matrix& a, double tolerance = 1e-12, int max_sweeps = 100);

}  // namespace recomb
