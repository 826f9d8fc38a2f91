#pragma once

#include <cstddef>
#include <vector>

#include "sprdm/error.hpp"

namespace sprdm {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles. Kept deliberately small: only the
// operations the rest of the library consumes.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const double& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

bool all_finite(const Vector& v);
bool all_finite(const Matrix& m);

// Componentwise logistic 1/(1+exp(-y)). Inputs are clamped to |y| <= 709
// before exponentiation and outputs stay strictly inside (0, 1).
double logistic_scalar(double y);
Vector logistic(const Vector& v);

// m * v and m^T * v.
Vector matvec(const Matrix& m, const Vector& v);
Vector transpose_apply(const Matrix& m, const Vector& v);

// m += scale * u v^T
void add_outer(Matrix& m, const Vector& u, const Vector& v, double scale);

Matrix transpose(const Matrix& m);
Matrix matmul(const Matrix& a, const Matrix& b);
// X^T X and X^T Y.
Matrix gram(const Matrix& x);
Matrix cross(const Matrix& x, const Matrix& y);

// Solves the ridge problem min_W ||X W - Y||^2 + lambda ||W||^2 through the
// normal equations (X^T X + lambda I) W = X^T Y with a Cholesky factorization.
// Throws SingularSystem when lambda == 0 and X^T X is rank-deficient.
Matrix ridge_solve(const Matrix& x, const Matrix& y, double lambda);

// In-place Cholesky solve of (symmetric positive definite) g * W = r.
// Throws SingularSystem when a pivot collapses.
Matrix cholesky_solve(Matrix g, const Matrix& r);

double squared_norm(const Vector& v);
double squared_norm(const Matrix& m);

}  // namespace sprdm
