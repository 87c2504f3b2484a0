#pragma once

#include <cstddef>
#include <vector>

#include "gchol/matrix.hpp"

namespace gchol {

/// Unit roundoff of IEEE binary64.
inline constexpr double kUnitRoundoff = 0x1p-53;

// Elementwise and structural helpers. All reductions accumulate left to
// right so results are bit-reproducible.

Matrix transpose(const Matrix& x);
Matrix add(const Matrix& x, const Matrix& y);
Matrix subtract(const Matrix& x, const Matrix& y);
Matrix scale(const Matrix& x, double s);
Matrix abs(const Matrix& x);

/// Standard product. Entry (i,j) is accumulated over k = 0, 1, ... starting
/// from +0.0.
Matrix matmul(const Matrix& x, const Matrix& y);

/// x * D and D * x for a positive diagonal D; also x * D^{-1}, D^{-1} * x.
Matrix scale_cols(const Matrix& x, const DiagScaling& d);
Matrix scale_rows(const DiagScaling& d, const Matrix& x);
Matrix unscale_cols(const Matrix& x, const DiagScaling& d);
Matrix unscale_rows(const DiagScaling& d, const Matrix& x);

bool is_symmetric(const Matrix& x);
bool is_lower_triangular(const Matrix& x);
bool is_upper_triangular(const Matrix& x);

/// Frobenius norm with overflow-safe scaling.
double fro_norm(const Matrix& x);
double max_abs(const Matrix& x);

/// Singular values in nonincreasing order, by one-sided Jacobi.
///
/// Sweeps until every column pair is orthogonal to relative tolerance
/// 1e-14. Throws ConvergenceError after 60 sweeps.
std::vector<double> singular_values(const Matrix& x);

/// Largest singular value. Zero for empty input.
double spectral_norm(const Matrix& x);

/// sigma_max / sigma_min. Throws SingularMatrixError when sigma_min is zero
/// or below order * u * sigma_max.
double kappa2(const Matrix& x);

/// Eigenvalues of a symmetric matrix in nondecreasing order (cyclic Jacobi).
std::vector<double> sym_eigenvalues(const Matrix& s);

/// Symmetric positive semi-definite test with tolerance
/// lambda_min >= -1e-10 * ||S||_2.
bool is_psd(const Matrix& s, double rel_tol = 1e-10);

/// Inverse of a lower-triangular matrix by forward substitution, one column
/// at a time. Throws SingularMatrixError on a zero diagonal entry.
Matrix lower_tri_inverse(const Matrix& l);
Matrix upper_tri_inverse(const Matrix& u);

/// General inverse by Gaussian elimination with partial pivoting.
/// Triangular inputs are dispatched to the substitution routines.
Matrix inverse(const Matrix& x);

/// Bauer-Skeel condition number || |X^{-1}| |X| ||_F.
double cond_bauer_skeel(const Matrix& x);

/// Strictly upper part of `a` plus half its diagonal.
Matrix up_operator(const Matrix& a);

/// Smaller root (b - sqrt(b^2 - 4ac)) / (2a) of a x^2 - b x + c, evaluated
/// as 2c / (b + sqrt(b^2 - 4ac)) to avoid cancellation for small c.
///
/// Requires a, b > 0. Throws ConditionViolated when the discriminant is not
/// positive.
double quadratic_root_bound(double a, double b, double c);

/// gamma_k = k u / (1 - k u). Throws when k u >= 1.
double gamma_k(std::size_t k, double u = kUnitRoundoff);

}  // namespace gchol
