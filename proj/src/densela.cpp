#include "gchol/densela.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "gchol/errors.hpp"

namespace gchol {

namespace {

constexpr double kJacobiTol = 1e-14;
constexpr int kJacobiMaxSweeps = 60;

void require_same_shape(const Matrix& x, const Matrix& y, const char* op) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch");
  }
}

void require_square(const Matrix& x, const char* op) {
  if (!x.is_square()) throw DimensionError(std::string(op) + ": not square");
}

template <typename F>
Matrix map2(const Matrix& x, const Matrix& y, F f) {
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = f(x(i, j), y(i, j));
  }
  return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

Matrix transpose(const Matrix& x) {
  Matrix out(x.cols(), x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) out(j, i) = x(i, j);
  }
  return out;
}

Matrix add(const Matrix& x, const Matrix& y) {
  require_same_shape(x, y, "add");
  return map2(x, y, std::plus<>{});
}

Matrix subtract(const Matrix& x, const Matrix& y) {
  require_same_shape(x, y, "subtract");
  return map2(x, y, std::minus<>{});
}

Matrix scale(const Matrix& x, double s) {
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = s * x(i, j);
  }
  return out;
}

Matrix abs(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = std::fabs(x(i, j));
  }
  return out;
}

Matrix matmul(const Matrix& x, const Matrix& y) {
  if (x.cols() != y.rows()) {
    throw DimensionError("matmul: inner dimensions differ (" +
                         std::to_string(x.cols()) + " vs " +
                         std::to_string(y.rows()) + ")");
  }
  Matrix out(x.rows(), y.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < y.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < x.cols(); ++k) s += x(i, k) * y(k, j);
      out(i, j) = s;
    }
  }
  return out;
}

Matrix scale_cols(const Matrix& x, const DiagScaling& d) {
  if (d.order() != x.cols()) throw DimensionError("scale_cols: order");
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = x(i, j) * d[j];
  }
  return out;
}

Matrix scale_rows(const DiagScaling& d, const Matrix& x) {
  if (d.order() != x.rows()) throw DimensionError("scale_rows: order");
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = d[i] * x(i, j);
  }
  return out;
}

Matrix unscale_cols(const Matrix& x, const DiagScaling& d) {
  if (d.order() != x.cols()) throw DimensionError("unscale_cols: order");
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = x(i, j) / d[j];
  }
  return out;
}

Matrix unscale_rows(const DiagScaling& d, const Matrix& x) {
  if (d.order() != x.rows()) throw DimensionError("unscale_rows: order");
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = x(i, j) / d[i];
  }
  return out;
}

bool is_symmetric(const Matrix& x) {
  if (!x.is_square()) return false;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (x(i, j) != x(j, i)) return false;
    }
  }
  return true;
}

bool is_lower_triangular(const Matrix& x) {
  if (!x.is_square()) return false;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = i + 1; j < x.cols(); ++j) {
      if (x(i, j) != 0.0) return false;
    }
  }
  return true;
}

bool is_upper_triangular(const Matrix& x) {
  return x.is_square() && is_lower_triangular(transpose(x));
}

double fro_norm(const Matrix& x) {
  // Scaled sum of squares: value = scale * sqrt(ssq).
  double scale = 0.0;
  double ssq = 1.0;
  for (double v : x.data()) {
    if (v == 0.0) continue;
    const double a = std::fabs(v);
    if (scale < a) {
      const double r = scale / a;
      ssq = 1.0 + ssq * r * r;
      scale = a;
    } else {
      const double r = a / scale;
      ssq += r * r;
    }
  }
  return scale * std::sqrt(ssq);
}

double max_abs(const Matrix& x) {
  double m = 0.0;
  for (double v : x.data()) m = std::max(m, std::fabs(v));
  return m;
}

std::vector<double> singular_values(const Matrix& x) {
  const bool tall = x.rows() >= x.cols();
  const std::size_t ncols = tall ? x.cols() : x.rows();
  const std::size_t len = tall ? x.rows() : x.cols();

  std::vector<std::vector<double>> g(ncols, std::vector<double>(len));
  for (std::size_t j = 0; j < ncols; ++j) {
    for (std::size_t i = 0; i < len; ++i) g[j][i] = tall ? x(i, j) : x(j, i);
  }

  bool converged = ncols < 2;
  for (int sweep = 0; sweep < kJacobiMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < ncols; ++p) {
      for (std::size_t q = p + 1; q < ncols; ++q) {
        const double alpha = dot(g[p], g[p]);
        const double beta = dot(g[q], g[q]);
        const double gamma = dot(g[p], g[q]);
        if (alpha == 0.0 || beta == 0.0) continue;
        if (std::fabs(gamma) <= kJacobiTol * std::sqrt(alpha) * std::sqrt(beta)) {
          continue;
        }
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) /
                         (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < len; ++i) {
          const double gp = g[p][i];
          const double gq = g[q][i];
          g[p][i] = c * gp - s * gq;
          g[q][i] = s * gp + c * gq;
        }
      }
    }
  }
  if (!converged) {
    throw ConvergenceError("one-sided Jacobi SVD did not converge in 60 sweeps");
  }

  std::vector<double> sigma(ncols);
  for (std::size_t j = 0; j < ncols; ++j) sigma[j] = fro_norm(Matrix(1, len, g[j]));
  std::sort(sigma.begin(), sigma.end(), std::greater<>{});
  return sigma;
}

double spectral_norm(const Matrix& x) {
  if (x.empty()) return 0.0;
  return singular_values(x).front();
}

double kappa2(const Matrix& x) {
  require_square(x, "kappa2");
  if (x.empty()) return 1.0;
  const auto sigma = singular_values(x);
  const double smax = sigma.front();
  const double smin = sigma.back();
  if (smin == 0.0 ||
      smin <= static_cast<double>(x.rows()) * kUnitRoundoff * smax) {
    throw SingularMatrixError("kappa2: matrix is numerically singular");
  }
  return smax / smin;
}

std::vector<double> sym_eigenvalues(const Matrix& s) {
  require_square(s, "sym_eigenvalues");
  if (!is_symmetric(s)) throw Error("sym_eigenvalues: matrix not symmetric");
  Matrix a = s;
  const std::size_t n = a.rows();
  const double total = fro_norm(a);

  auto off = [&] {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) sum += a(i, j) * a(i, j);
      }
    }
    return std::sqrt(sum);
  };

  int sweep = 0;
  while (total > 0.0 && off() > kJacobiTol * total) {
    if (sweep++ == kJacobiMaxSweeps) {
      throw ConvergenceError("symmetric Jacobi did not converge in 60 sweeps");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = std::copysign(1.0, tau) /
                         (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * c;
        // A <- G^T A G with G the (p,q) rotation.
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
      }
    }
  }

  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

bool is_psd(const Matrix& s, double rel_tol) {
  if (!is_symmetric(s)) return false;
  if (s.empty()) return true;
  const auto eig = sym_eigenvalues(s);
  const double norm2 = std::max(std::fabs(eig.front()), std::fabs(eig.back()));
  return eig.front() >= -rel_tol * norm2;
}

Matrix lower_tri_inverse(const Matrix& l) {
  require_square(l, "lower_tri_inverse");
  if (!is_lower_triangular(l)) {
    throw DimensionError("lower_tri_inverse: matrix is not lower triangular");
  }
  const std::size_t n = l.rows();
  for (std::size_t i = 0; i < n; ++i) {
    if (l(i, i) == 0.0) {
      throw SingularMatrixError("lower_tri_inverse: zero diagonal entry at " +
                                std::to_string(i + 1));
    }
  }
  Matrix inv(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    inv(j, j) = 1.0 / l(j, j);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = j; k < i; ++k) s += l(i, k) * inv(k, j);
      inv(i, j) = -s / l(i, i);
    }
  }
  return inv;
}

Matrix upper_tri_inverse(const Matrix& u) {
  return transpose(lower_tri_inverse(transpose(u)));
}

Matrix inverse(const Matrix& x) {
  require_square(x, "inverse");
  if (is_lower_triangular(x)) return lower_tri_inverse(x);
  if (is_upper_triangular(x)) return upper_tri_inverse(x);

  const std::size_t n = x.rows();
  Matrix a = x;
  Matrix inv = Matrix::identity(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::fabs(a(i, k)) > std::fabs(a(piv, k))) piv = i;
    }
    if (a(piv, k) == 0.0) throw SingularMatrixError("inverse: singular matrix");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(k, j), a(piv, j));
        std::swap(inv(k, j), inv(piv, j));
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || a(i, k) == 0.0) continue;
      const double f = a(i, k) / a(k, k);
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) -= f * a(k, j);
        inv(i, j) -= f * inv(k, j);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) inv(i, j) /= a(i, i);
  }
  return inv;
}

double cond_bauer_skeel(const Matrix& x) {
  require_square(x, "cond_bauer_skeel");
  return fro_norm(matmul(abs(inverse(x)), abs(x)));
}

Matrix up_operator(const Matrix& a) {
  require_square(a, "up_operator");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    out(i, i) = 0.5 * a(i, i);
    for (std::size_t j = i + 1; j < a.cols(); ++j) out(i, j) = a(i, j);
  }
  return out;
}

double quadratic_root_bound(double a, double b, double c) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw Error("quadratic_root_bound: a and b must be positive");
  }
  const double disc = b * b - 4.0 * a * c;
  if (!(disc > 0.0)) {
    throw ConditionViolated("discriminant",
                            "quadratic_root_bound: b^2 - 4ac is not positive");
  }
  return 2.0 * c / (b + std::sqrt(disc));
}

double gamma_k(std::size_t k, double u) {
  const double ku = static_cast<double>(k) * u;
  if (!(ku < 1.0)) throw Error("gamma_k: k * u must be below 1");
  return ku / (1.0 - ku);
}

}  // namespace gchol
