#pragma once

// Hand-rolled generators and reference implementations shared by the tests.
// Everything here is deliberately naive so it can serve as an oracle.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "gchol/matrix.hpp"

namespace gchol::test {

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

inline Matrix random_matrix(std::size_t r, std::size_t c,
                            std::mt19937_64& rng, double lo = -1.0,
                            double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix x(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) x(i, j) = dist(rng);
  }
  return x;
}

inline Matrix random_symmetric(std::size_t p, std::mt19937_64& rng) {
  Matrix x = random_matrix(p, p, rng);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < i; ++j) x(j, i) = x(i, j);
  }
  return x;
}

/// Lower triangular with diagonal in [1, 2] and off-diagonal in [-1, 1].
inline Matrix random_lower(std::size_t p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> off(-1.0, 1.0);
  std::uniform_real_distribution<double> diag(1.0, 2.0);
  Matrix l(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < i; ++j) l(i, j) = off(rng);
    l(i, i) = diag(rng);
  }
  return l;
}

inline std::vector<double> random_positive(std::size_t p,
                                           std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(0.1, 10.0);
  std::vector<double> d(p);
  for (auto& v : d) v = dist(rng);
  return d;
}

/// Textbook triple loop, k innermost.
inline Matrix naive_matmul(const Matrix& x, const Matrix& y) {
  Matrix z(x.rows(), y.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < y.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < x.cols(); ++k) s += x(i, k) * y(k, j);
      z(i, j) = s;
    }
  }
  return z;
}

inline Matrix naive_transpose(const Matrix& x) {
  Matrix t(x.cols(), x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) t(j, i) = x(i, j);
  }
  return t;
}

inline double naive_fro(const Matrix& x) {
  double s = 0.0;
  for (double v : x.data()) s += v * v;
  return std::sqrt(s);
}

inline Matrix naive_diff(const Matrix& x, const Matrix& y) {
  Matrix z(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) z(i, j) = x(i, j) - y(i, j);
  }
  return z;
}

/// Largest singular value by power iteration on X^T X.
inline double power_iteration_norm(const Matrix& x, int iters = 5000) {
  const Matrix xtx = naive_matmul(naive_transpose(x), x);
  std::vector<double> v(xtx.cols(), 1.0);
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    std::vector<double> w(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
      for (std::size_t j = 0; j < v.size(); ++j) w[i] += xtx(i, j) * v[j];
    }
    double norm = 0.0;
    for (double e : w) norm += e * e;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / norm;
    lambda = norm;
  }
  return std::sqrt(lambda);
}

/// Singular values of a 2x2 matrix from the closed form.
inline void svd2x2(double a, double b, double c, double d, double& smax,
                   double& smin) {
  const double s1 = a * a + b * b + c * c + d * d;
  const double det = std::abs(a * d - b * c);
  const double root = std::sqrt(s1 * s1 - 4.0 * det * det);
  smax = std::sqrt((s1 + root) / 2.0);
  smin = det / smax;
}

}  // namespace gchol::test
