#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "gchol/errors.hpp"
#include "gchol/matrix.hpp"

namespace gchol {

/// Block dimensions of a saddle-point matrix: A is m x m, C is n x n.
/// n = 0 reduces everything to ordinary Cholesky.
struct BlockSpec {
  std::size_t m = 1;
  std::size_t n = 0;

  BlockSpec() = default;
  BlockSpec(std::size_t m_, std::size_t n_);

  std::size_t order() const noexcept { return m + n; }
  bool operator==(const BlockSpec&) const = default;
};

/// Diagonal of the signature matrix: m entries +1 followed by n entries -1.
std::vector<double> signature(const BlockSpec& spec);

/// K = [A B^T; B -C] with A SPD, B of full row rank, C PSD.
class SaddleMatrix {
 public:
  /// Validates every block invariant; throws Error describing the first
  /// failure.
  static SaddleMatrix from_blocks(Matrix a, Matrix b, Matrix c);

  /// Splits an exactly symmetric dense K and validates the blocks.
  static SaddleMatrix from_dense(const Matrix& k, BlockSpec spec);

  const BlockSpec& spec() const noexcept { return spec_; }
  const Matrix& a() const noexcept { return a_; }
  const Matrix& b() const noexcept { return b_; }
  const Matrix& c() const noexcept { return c_; }

 private:
  SaddleMatrix(BlockSpec spec, Matrix a, Matrix b, Matrix c)
      : spec_(spec), a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {}

  BlockSpec spec_;
  Matrix a_;
  Matrix b_;
  Matrix c_;
};

/// Block lower-triangular factor [L11 0; L21 L22] with K = L J L^T.
class GenCholFactor {
 public:
  /// L11 and L22 must be lower triangular with positive diagonals.
  GenCholFactor(BlockSpec spec, Matrix l11, Matrix l21, Matrix l22);

  static GenCholFactor from_dense(const Matrix& l, BlockSpec spec);

  const BlockSpec& spec() const noexcept { return spec_; }
  const Matrix& l11() const noexcept { return l11_; }
  const Matrix& l21() const noexcept { return l21_; }
  const Matrix& l22() const noexcept { return l22_; }

 private:
  BlockSpec spec_;
  Matrix l11_;
  Matrix l21_;
  Matrix l22_;
};

/// Which Cholesky step broke down.
enum class FactorBlock { leading, schur };

class FactorizationError : public NotPositiveDefinite {
 public:
  FactorizationError(FactorBlock block, std::size_t pivot,
                     const std::string& what)
      : NotPositiveDefinite(pivot, what), block_(block) {}

  FactorBlock block() const noexcept { return block_; }

 private:
  FactorBlock block_;
};

/// Lower Cholesky factor; throws NotPositiveDefinite with the 1-based index
/// of the first non-positive pivot.
Matrix cholesky_lower(const Matrix& a);

Matrix assemble_k(const SaddleMatrix& s);

/// Generalized Cholesky factorization: L11 = chol(A), L21 L11^T = B,
/// L22 = chol(C + L21 L21^T). Pivot indices in errors are global and
/// 1-based.
GenCholFactor factorize(const SaddleMatrix& s);

/// Same algorithm applied to the blocks of a dense symmetric K without the
/// SaddleMatrix input checks. Used for perturbed matrices, whose C block
/// need not stay semi-definite.
GenCholFactor factorize_dense(const Matrix& k, BlockSpec spec);

/// x * J for the signature of `spec`.
Matrix times_signature(const Matrix& x, const BlockSpec& spec);

/// L J L^T, computed as (L J) * L^T with matmul.
Matrix reconstruct(const GenCholFactor& l);

Matrix factor_to_dense(const GenCholFactor& l);

/// Dense L_tilde - L. Throws DimensionError when block specs differ.
Matrix delta_factor(const GenCholFactor& l_tilde, const GenCholFactor& l);

/// Parsed saddle-point file before block validation.
struct SaddleFile {
  BlockSpec spec;
  Matrix k;
};

/// SaddleMatrix text format: `<m> <n>` then the rows of the dense K.
/// Parsing checks shape and exact symmetry only.
SaddleFile read_saddle_dense(std::istream& is);

/// Parses and validates the blocks.
SaddleMatrix read_saddle(std::istream& is);
void write_saddle(std::ostream& os, const SaddleMatrix& s);

}  // namespace gchol
