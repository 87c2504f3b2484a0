#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "gchol/genchol.hpp"
#include "gchol/matrix.hpp"

namespace gchol {

// Error-free transformations.

/// s + e == a + b exactly (Knuth).
inline void two_sum(double a, double b, double& s, double& e) noexcept {
  s = a + b;
  const double bb = s - a;
  e = (a - (s - bb)) + (b - bb);
}

/// p + e == a * b exactly.
inline void two_prod(double a, double b, double& p, double& e) noexcept {
  p = a * b;
  e = std::fma(a, b, -p);
}

/// Compensated dot-product accumulator: result is as accurate as if the
/// sum were computed in twice the working precision, then rounded.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    double e;
    two_sum(sum_, x, sum_, e);
    err_ += e;
  }
  void add_product(double a, double b) noexcept {
    double p, ep;
    two_prod(a, b, p, ep);
    add(p);
    err_ += ep;
  }
  double value() const noexcept { return sum_ + err_; }

 private:
  double sum_ = 0.0;
  double err_ = 0.0;
};

/// Lower triangle of an order-p matrix stacked column by column:
/// (s11, s21, ..., sp1, s22, ..., spp). Length p(p+1)/2.
struct HalfVec {
  std::size_t order = 0;
  std::vector<double> values;
};

/// Position of entry (i, j), i >= j, in the column-stacked lower triangle.
std::size_t halfvec_index(std::size_t order, std::size_t i, std::size_t j);

/// Half-vectorization of a symmetric matrix, no weighting of off-diagonal
/// entries. Throws on inexact symmetry.
HalfVec duvec(const Matrix& s);

/// Bijection between lower-triangular matrices and HalfVec.
HalfVec uvec_lower(const Matrix& x);
Matrix unuvec(const HalfVec& h);

/// Matrix of X -> duvec(X J L^T + L J X^T) over lower-triangular X, in the
/// HalfVec bases. Lower triangular.
struct WOperator {
  std::size_t order = 0;
  Matrix entries;
};

WOperator build_w(const GenCholFactor& l);

/// Solves W y = h by forward substitution.
HalfVec w_solve(const WOperator& w, const HalfVec& h);

/// ||W^{-1}||_2 from the explicit inverse.
double w_inverse_norm(const WOperator& w);

/// factorize(K + dK) - factorize(K), dense lower triangular. Factorization
/// breakdowns propagate as FactorizationError.
Matrix actual_delta_l(const SaddleMatrix& s, const Matrix& dk);
Matrix actual_delta_l(const Matrix& k, BlockSpec spec, const Matrix& dk);

/// L J L^T - K with every entry accumulated by error-free transformations.
Matrix compensated_residual(const GenCholFactor& l, const SaddleMatrix& s);
Matrix compensated_residual(const GenCholFactor& l, const Matrix& k);

/// Same residual in plain floating point (reconstruct(l) - K).
Matrix plain_residual(const GenCholFactor& l, const Matrix& k);

/// L J L^T - E computed with compensation, for synthesizing a matrix
/// whose exact factor is known to working accuracy.
Matrix compensated_ljlt_minus(const GenCholFactor& l, const Matrix& e);

}  // namespace gchol
