#include "gchol/oracle.hpp"

#include "gchol/densela.hpp"
#include "gchol/errors.hpp"

namespace gchol {

namespace {

Matrix compensated_ljlt_plus(const GenCholFactor& l, const Matrix& offset,
                             double sign) {
  const Matrix dense = factor_to_dense(l);
  const auto j = signature(l.spec());
  const std::size_t p = dense.rows();
  if (offset.rows() != p || offset.cols() != p) {
    throw DimensionError("residual: K and L orders differ");
  }
  Matrix r(p, p);
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = 0; b < p; ++b) {
      CompensatedSum acc;
      for (std::size_t k = 0; k <= std::min(a, b); ++k) {
        acc.add_product(j[k] * dense(a, k), dense(b, k));
      }
      acc.add(sign * offset(a, b));
      r(a, b) = acc.value();
    }
  }
  return r;
}

}  // namespace

std::size_t halfvec_index(std::size_t order, std::size_t i, std::size_t j) {
  // Columns before j hold p + (p-1) + ... + (p-j+1) entries.
  return j * order - j * (j - 1) / 2 + (i - j);
}

HalfVec duvec(const Matrix& s) {
  if (!is_symmetric(s)) throw Error("duvec: matrix is not symmetric");
  const std::size_t p = s.rows();
  HalfVec h{p, {}};
  h.values.reserve(p * (p + 1) / 2);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = j; i < p; ++i) h.values.push_back(s(i, j));
  }
  return h;
}

HalfVec uvec_lower(const Matrix& x) {
  if (!is_lower_triangular(x)) {
    throw DimensionError("uvec_lower: matrix has a nonzero strict upper part");
  }
  const std::size_t p = x.rows();
  HalfVec h{p, {}};
  h.values.reserve(p * (p + 1) / 2);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = j; i < p; ++i) h.values.push_back(x(i, j));
  }
  return h;
}

Matrix unuvec(const HalfVec& h) {
  const std::size_t p = h.order;
  if (h.values.size() != p * (p + 1) / 2) {
    throw DimensionError("unuvec: length is not p(p+1)/2");
  }
  Matrix x(p, p);
  std::size_t idx = 0;
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = j; i < p; ++i) x(i, j) = h.values[idx++];
  }
  return x;
}

WOperator build_w(const GenCholFactor& l) {
  const Matrix dense = factor_to_dense(l);
  const Matrix jlt = transpose(times_signature(dense, l.spec()));
  const std::size_t p = dense.rows();
  const std::size_t dim = p * (p + 1) / 2;

  WOperator w{p, Matrix(dim, dim)};
  std::size_t col = 0;
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = j; i < p; ++i, ++col) {
      Matrix basis(p, p);
      basis(i, j) = 1.0;
      const Matrix t = matmul(basis, jlt);
      const HalfVec image = duvec(add(t, transpose(t)));
      for (std::size_t r = 0; r < dim; ++r) w.entries(r, col) = image.values[r];
    }
  }
  return w;
}

HalfVec w_solve(const WOperator& w, const HalfVec& h) {
  const std::size_t dim = w.entries.rows();
  if (h.values.size() != dim) throw DimensionError("w_solve: length mismatch");
  HalfVec y{h.order, std::vector<double>(dim)};
  for (std::size_t r = 0; r < dim; ++r) {
    if (w.entries(r, r) == 0.0) {
      throw SingularMatrixError("w_solve: zero diagonal entry");
    }
    double s = h.values[r];
    for (std::size_t k = 0; k < r; ++k) s -= w.entries(r, k) * y.values[k];
    y.values[r] = s / w.entries(r, r);
  }
  return y;
}

double w_inverse_norm(const WOperator& w) {
  return spectral_norm(lower_tri_inverse(w.entries));
}

Matrix actual_delta_l(const Matrix& k, BlockSpec spec, const Matrix& dk) {
  if (!is_symmetric(dk)) throw Error("actual_delta_l: dK is not symmetric");
  const GenCholFactor base = factorize_dense(k, spec);
  const GenCholFactor perturbed = factorize_dense(add(k, dk), spec);
  return delta_factor(perturbed, base);
}

Matrix actual_delta_l(const SaddleMatrix& s, const Matrix& dk) {
  return actual_delta_l(assemble_k(s), s.spec(), dk);
}

Matrix compensated_residual(const GenCholFactor& l, const Matrix& k) {
  return compensated_ljlt_plus(l, k, -1.0);
}

Matrix compensated_residual(const GenCholFactor& l, const SaddleMatrix& s) {
  return compensated_residual(l, assemble_k(s));
}

Matrix plain_residual(const GenCholFactor& l, const Matrix& k) {
  return subtract(reconstruct(l), k);
}

Matrix compensated_ljlt_minus(const GenCholFactor& l, const Matrix& e) {
  return compensated_ljlt_plus(l, e, -1.0);
}

}  // namespace gchol
