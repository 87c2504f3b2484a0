#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace gchol {

/// Dense row-major matrix of doubles.
///
/// Construction from caller-supplied data rejects NaN and Inf. The
/// zero-initialising constructor is what kernels use for their outputs.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) noexcept {
    return data_[i * cols_ + j];
  }

  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> data() const noexcept { return data_; }

  /// Copy of the block starting at (r0, c0) with the given shape.
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr,
               std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& src);

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Positive diagonal scaling, a member of the set of positive definite
/// diagonal matrices.
class DiagScaling {
 public:
  explicit DiagScaling(std::vector<double> diag);
  static DiagScaling identity(std::size_t n);

  std::size_t order() const noexcept { return diag_.size(); }
  std::span<const double> diag() const noexcept { return diag_; }
  double operator[](std::size_t i) const noexcept { return diag_[i]; }

  Matrix dense() const;

 private:
  std::vector<double> diag_;
};

/// Format a double with 17 significant digits (round-trip exact).
std::string format_double(double x);

/// Matrix text format: `<rows> <cols>` then one line per row.
void write_matrix(std::ostream& os, const Matrix& x);
Matrix read_matrix(std::istream& is);

/// Read `rows` lines of `cols` values each (no header).
Matrix read_matrix_body(std::istream& is, std::size_t rows, std::size_t cols);

}  // namespace gchol
