#include "sprdm/numerics.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace sprdm {

namespace {

void check_mul_shapes(std::size_t inner_a, std::size_t inner_b, const char* what) {
  if (inner_a != inner_b) {
    throw DimensionMismatch(std::string(what) + ": inner dimensions " +
                            std::to_string(inner_a) + " vs " + std::to_string(inner_b));
  }
}

}  // namespace

bool all_finite(const Vector& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

bool all_finite(const Matrix& m) { return all_finite(m.data()); }

double logistic_scalar(double y) {
  if (y > 709.0) y = 709.0;
  if (y < -709.0) y = -709.0;
  double out;
  if (y >= 0.0) {
    out = 1.0 / (1.0 + std::exp(-y));
  } else {
    const double e = std::exp(y);
    out = e / (1.0 + e);
  }
  // 1/(1+exp(-y)) can round to 1.0 for large y; keep the open interval.
  const double top = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  if (out >= 1.0) out = top;
  if (out <= 0.0) out = std::numeric_limits<double>::min();
  return out;
}

Vector logistic(const Vector& v) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = logistic_scalar(v[i]);
  return out;
}

Vector matvec(const Matrix& m, const Vector& v) {
  check_mul_shapes(m.cols(), v.size(), "matvec");
  Vector out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) acc += m(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

Vector transpose_apply(const Matrix& m, const Vector& v) {
  check_mul_shapes(m.rows(), v.size(), "transpose_apply");
  Vector out(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double vi = v[i];
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += m(i, j) * vi;
  }
  return out;
}

void add_outer(Matrix& m, const Vector& u, const Vector& v, double scale) {
  if (m.rows() != u.size() || m.cols() != v.size()) {
    throw DimensionMismatch("add_outer: matrix is " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + ", vectors " +
                            std::to_string(u.size()) + " and " + std::to_string(v.size()));
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double ui = scale * u[i];
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) += ui * v[j];
  }
}

Matrix transpose(const Matrix& m) {
  Matrix out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  check_mul_shapes(a.cols(), b.rows(), "matmul");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

Matrix gram(const Matrix& x) {
  Matrix g(x.cols(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t i = 0; i < x.cols(); ++i) {
      const double xi = x(r, i);
      if (xi == 0.0) continue;
      for (std::size_t j = i; j < x.cols(); ++j) g(i, j) += xi * x(r, j);
    }
  }
  for (std::size_t i = 0; i < x.cols(); ++i)
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

Matrix cross(const Matrix& x, const Matrix& y) {
  check_mul_shapes(x.rows(), y.rows(), "cross");
  Matrix out(x.cols(), y.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t i = 0; i < x.cols(); ++i) {
      const double xi = x(r, i);
      if (xi == 0.0) continue;
      for (std::size_t j = 0; j < y.cols(); ++j) out(i, j) += xi * y(r, j);
    }
  }
  return out;
}

namespace {

// Lower-triangular Cholesky factor in place; false on a collapsed pivot.
bool cholesky_factor(Matrix& g) {
  const std::size_t n = g.rows();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(g(i, i)));
  if (scale == 0.0) scale = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    double d = g(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= g(j, k) * g(j, k);
    if (!(d > scale * 1e-13)) return false;
    const double ljj = std::sqrt(d);
    g(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = g(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= g(i, k) * g(j, k);
      g(i, j) = s / ljj;
    }
  }
  return true;
}

}  // namespace

Matrix cholesky_solve(Matrix g, const Matrix& r) {
  if (g.rows() != g.cols() || g.rows() != r.rows()) {
    throw DimensionMismatch("cholesky_solve: system is " + std::to_string(g.rows()) + "x" +
                            std::to_string(g.cols()) + ", rhs has " +
                            std::to_string(r.rows()) + " rows");
  }
  if (!cholesky_factor(g)) {
    throw SingularSystem("cholesky_solve: matrix is not positive definite");
  }
  const std::size_t n = g.rows();
  Matrix w = r;
  // Forward substitution L z = r, column by column.
  for (std::size_t c = 0; c < w.cols(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = w(i, c);
      for (std::size_t k = 0; k < i; ++k) s -= g(i, k) * w(k, c);
      w(i, c) = s / g(i, i);
    }
    // Back substitution L^T w = z.
    for (std::size_t ii = n; ii-- > 0;) {
      double s = w(ii, c);
      for (std::size_t k = ii + 1; k < n; ++k) s -= g(k, ii) * w(k, c);
      w(ii, c) = s / g(ii, ii);
    }
  }
  return w;
}

Matrix ridge_solve(const Matrix& x, const Matrix& y, double lambda) {
  if (x.rows() == 0 || x.cols() == 0) {
    throw DimensionMismatch("ridge_solve: empty design matrix");
  }
  if (x.rows() != y.rows()) {
    throw DimensionMismatch("ridge_solve: X has " + std::to_string(x.rows()) +
                            " rows, Y has " + std::to_string(y.rows()));
  }
  if (lambda < 0.0) {
    throw SingularSystem("ridge_solve: negative lambda");
  }
  Matrix g = gram(x);
  const Matrix r = cross(x, y);
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) += lambda;

  double diag_scale = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i) diag_scale += g(i, i);
  diag_scale = std::max(diag_scale / static_cast<double>(g.rows()), 1.0);

  double jitter = 0.0;
  for (int attempt = 0; attempt < 4; ++attempt) {
    Matrix sys = g;
    if (jitter > 0.0) {
      for (std::size_t i = 0; i < sys.rows(); ++i) sys(i, i) += jitter;
    }
    try {
      Matrix w = cholesky_solve(std::move(sys), r);
      if (!all_finite(w)) throw SingularSystem("ridge_solve: non-finite solution");
      return w;
    } catch (const SingularSystem&) {
      if (lambda == 0.0) {
        throw SingularSystem("ridge_solve: X^T X is rank-deficient and lambda == 0");
      }
      jitter = (jitter == 0.0) ? 1e-10 * diag_scale : jitter * 100.0;
    }
  }
  throw SingularSystem("ridge_solve: system stayed indefinite after jitter retries");
}

double squared_norm(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double squared_norm(const Matrix& m) { return squared_norm(m.data()); }

}  // namespace sprdm
