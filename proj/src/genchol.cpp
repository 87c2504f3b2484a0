#include "gchol/genchol.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "gchol/densela.hpp"

namespace gchol {

namespace {

constexpr double kRankTol = 1e-12;

void require_lower_positive(const Matrix& l, const char* name) {
  if (!is_lower_triangular(l)) {
    throw DimensionError(std::string(name) + " must be square lower triangular");
  }
  for (std::size_t i = 0; i < l.rows(); ++i) {
    if (!(l(i, i) > 0.0)) {
      throw Error(std::string(name) + " must have a positive diagonal");
    }
  }
}

// Solves X * L^T = B for X, row by row, by forward substitution against L.
Matrix solve_right_lower_transpose(const Matrix& b, const Matrix& l) {
  Matrix x(b.rows(), l.rows());
  for (std::size_t r = 0; r < b.rows(); ++r) {
    for (std::size_t j = 0; j < l.rows(); ++j) {
      double s = b(r, j);
      for (std::size_t k = 0; k < j; ++k) s -= x(r, k) * l(j, k);
      x(r, j) = s / l(j, j);
    }
  }
  return x;
}

}  // namespace

BlockSpec::BlockSpec(std::size_t m_, std::size_t n_) : m(m_), n(n_) {
  if (m == 0) throw DimensionError("block spec requires m >= 1");
}

std::vector<double> signature(const BlockSpec& spec) {
  std::vector<double> j(spec.order(), 1.0);
  for (std::size_t i = spec.m; i < spec.order(); ++i) j[i] = -1.0;
  return j;
}

SaddleMatrix SaddleMatrix::from_blocks(Matrix a, Matrix b, Matrix c) {
  if (!a.is_square() || a.rows() == 0) {
    throw DimensionError("A must be square with m >= 1");
  }
  const BlockSpec spec(a.rows(), c.rows());
  if (!c.is_square()) throw DimensionError("C must be square");
  if (b.rows() != spec.n || b.cols() != spec.m) {
    throw DimensionError("B must be n x m");
  }
  if (!is_symmetric(a)) throw Error("A is not symmetric");
  try {
    cholesky_lower(a);
  } catch (const NotPositiveDefinite& e) {
    throw NotPositiveDefinite(e.pivot(), std::string("A is not positive definite: ") + e.what());
  }
  if (!is_symmetric(c)) throw Error("C is not symmetric");
  if (!is_psd(c)) throw Error("C is not positive semi-definite");
  if (spec.n > 0) {
    if (spec.n > spec.m) throw Error("B cannot have full row rank when n > m");
    const auto sigma = singular_values(b);
    if (!(sigma.back() > kRankTol * sigma.front())) {
      throw Error("B does not have full row rank");
    }
  }
  return SaddleMatrix(spec, std::move(a), std::move(b), std::move(c));
}

SaddleMatrix SaddleMatrix::from_dense(const Matrix& k, BlockSpec spec) {
  if (k.rows() != spec.order() || !k.is_square()) {
    throw DimensionError("K does not have order m + n");
  }
  if (!is_symmetric(k)) throw Error("K is not symmetric");
  return from_blocks(k.block(0, 0, spec.m, spec.m),
                     k.block(spec.m, 0, spec.n, spec.m),
                     scale(k.block(spec.m, spec.m, spec.n, spec.n), -1.0));
}

GenCholFactor::GenCholFactor(BlockSpec spec, Matrix l11, Matrix l21,
                             Matrix l22)
    : spec_(spec),
      l11_(std::move(l11)),
      l21_(std::move(l21)),
      l22_(std::move(l22)) {
  if (l11_.rows() != spec_.m || l22_.rows() != spec_.n ||
      l21_.rows() != spec_.n || l21_.cols() != spec_.m) {
    throw DimensionError("factor blocks do not match the block spec");
  }
  require_lower_positive(l11_, "L11");
  require_lower_positive(l22_, "L22");
}

GenCholFactor GenCholFactor::from_dense(const Matrix& l, BlockSpec spec) {
  if (!l.is_square() || l.rows() != spec.order()) {
    throw DimensionError("dense factor does not have order m + n");
  }
  if (!is_lower_triangular(l)) {
    throw DimensionError("dense factor is not lower triangular");
  }
  return GenCholFactor(spec, l.block(0, 0, spec.m, spec.m),
                       l.block(spec.m, 0, spec.n, spec.m),
                       l.block(spec.m, spec.m, spec.n, spec.n));
}

Matrix cholesky_lower(const Matrix& a) {
  if (!a.is_square()) throw DimensionError("cholesky_lower: not square");
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) {
      throw NotPositiveDefinite(j + 1, "non-positive pivot " +
                                           format_double(d) + " at index " +
                                           std::to_string(j + 1));
    }
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

Matrix assemble_k(const SaddleMatrix& s) {
  const auto& spec = s.spec();
  Matrix k(spec.order(), spec.order());
  k.set_block(0, 0, s.a());
  k.set_block(spec.m, 0, s.b());
  k.set_block(0, spec.m, transpose(s.b()));
  k.set_block(spec.m, spec.m, scale(s.c(), -1.0));
  return k;
}

GenCholFactor factorize_dense(const Matrix& k, BlockSpec spec) {
  if (!k.is_square() || k.rows() != spec.order()) {
    throw DimensionError("K does not have order m + n");
  }
  Matrix l11;
  try {
    l11 = cholesky_lower(k.block(0, 0, spec.m, spec.m));
  } catch (const NotPositiveDefinite& e) {
    throw FactorizationError(FactorBlock::leading, e.pivot(),
                             std::string("A is not positive definite: ") +
                                 e.what());
  }
  const Matrix l21 =
      solve_right_lower_transpose(k.block(spec.m, 0, spec.n, spec.m), l11);

  // Schur block C + L21 L21^T with C = -K22.
  Matrix schur(spec.n, spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    for (std::size_t j = 0; j < spec.n; ++j) {
      double s = -k(spec.m + i, spec.m + j);
      for (std::size_t q = 0; q < spec.m; ++q) s += l21(i, q) * l21(j, q);
      schur(i, j) = s;
    }
  }
  Matrix l22;
  try {
    l22 = cholesky_lower(schur);
  } catch (const NotPositiveDefinite& e) {
    const std::size_t pivot = spec.m + e.pivot();
    throw FactorizationError(
        FactorBlock::schur, pivot,
        "C + L21 L21^T is not positive definite: non-positive pivot at index " +
            std::to_string(pivot));
  }
  return GenCholFactor(spec, std::move(l11), l21, std::move(l22));
}

GenCholFactor factorize(const SaddleMatrix& s) {
  return factorize_dense(assemble_k(s), s.spec());
}

Matrix factor_to_dense(const GenCholFactor& l) {
  const auto& spec = l.spec();
  Matrix out(spec.order(), spec.order());
  out.set_block(0, 0, l.l11());
  out.set_block(spec.m, 0, l.l21());
  out.set_block(spec.m, spec.m, l.l22());
  return out;
}

Matrix times_signature(const Matrix& x, const BlockSpec& spec) {
  if (x.cols() != spec.order()) throw DimensionError("times_signature: order");
  Matrix out = x;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = spec.m; j < spec.order(); ++j) out(i, j) = -x(i, j);
  }
  return out;
}

Matrix reconstruct(const GenCholFactor& l) {
  const Matrix dense = factor_to_dense(l);
  return matmul(times_signature(dense, l.spec()), transpose(dense));
}

Matrix delta_factor(const GenCholFactor& l_tilde, const GenCholFactor& l) {
  if (!(l_tilde.spec() == l.spec())) {
    throw DimensionError("delta_factor: block specs differ");
  }
  return subtract(factor_to_dense(l_tilde), factor_to_dense(l));
}

SaddleFile read_saddle_dense(std::istream& is) {
  std::string line;
  while (std::getline(is, line) &&
         line.find_first_not_of(" \t\r") == std::string::npos) {
  }
  std::istringstream hs(line);
  long long m = -1;
  long long n = -1;
  std::string extra;
  if (!(hs >> m >> n) || (hs >> extra) || m < 1 || n < 0) {
    throw ParseError("saddle header must be '<m> <n>' with m >= 1, n >= 0");
  }
  const BlockSpec spec(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
  Matrix k = read_matrix_body(is, spec.order(), spec.order());
  if (!is_symmetric(k)) throw ParseError("K is not exactly symmetric");
  return {spec, k};
}

SaddleMatrix read_saddle(std::istream& is) {
  auto file = read_saddle_dense(is);
  return SaddleMatrix::from_dense(file.k, file.spec);
}

void write_saddle(std::ostream& os, const SaddleMatrix& s) {
  os << s.spec().m << ' ' << s.spec().n << '\n';
  std::ostringstream body;
  write_matrix(body, assemble_k(s));
  const std::string text = body.str();
  os << text.substr(text.find('\n') + 1);
}

}  // namespace gchol
