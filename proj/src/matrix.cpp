#include "gchol/matrix.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "gchol/errors.hpp"

namespace gchol {

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("matrix data length does not match its shape");
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw Error("matrix entries must be finite");
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("ragged matrix literal");
    for (double v : r) {
      if (!std::isfinite(v)) throw Error("matrix entries must be finite");
      data_.push_back(v);
    }
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  Matrix out(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) out(i, i) = diag[i];
  return out;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr,
                     std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) {
    throw DimensionError("block out of range");
  }
  Matrix out(nr, nc);
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nc; ++j) out(i, j) = (*this)(r0 + i, c0 + j);
  }
  return out;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& src) {
  if (r0 + src.rows() > rows_ || c0 + src.cols() > cols_) {
    throw DimensionError("block out of range");
  }
  for (std::size_t i = 0; i < src.rows(); ++i) {
    for (std::size_t j = 0; j < src.cols(); ++j) {
      (*this)(r0 + i, c0 + j) = src(i, j);
    }
  }
}

DiagScaling::DiagScaling(std::vector<double> diag) : diag_(std::move(diag)) {
  for (double d : diag_) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw Error("diagonal scaling entries must be positive and finite");
    }
  }
}

DiagScaling DiagScaling::identity(std::size_t n) {
  return DiagScaling(std::vector<double>(n, 1.0));
}

Matrix DiagScaling::dense() const { return Matrix::diagonal(diag_); }

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x,
                           std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_matrix(std::ostream& os, const Matrix& x) {
  os << x.rows() << ' ' << x.cols() << '\n';
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      if (j) os << ' ';
      os << format_double(x(i, j));
    }
    os << '\n';
  }
}

namespace {

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

std::size_t parse_count(const std::string& tok) {
  std::size_t v = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    throw ParseError("expected a non-negative integer, got '" + tok + "'");
  }
  return v;
}

double parse_value(const std::string& tok) {
  double v = 0.0;
  const char* first = tok.data();
  if (!tok.empty() && tok[0] == '+') ++first;
  auto res = std::from_chars(first, tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    throw ParseError("malformed number '" + tok + "'");
  }
  if (!std::isfinite(v)) throw ParseError("non-finite value '" + tok + "'");
  return v;
}

}  // namespace

Matrix read_matrix_body(std::istream& is, std::size_t rows,
                        std::size_t cols) {
  std::vector<double> data;
  data.reserve(rows * cols);
  std::string line;
  std::size_t got = 0;
  while (got < rows) {
    if (!std::getline(is, line)) {
      throw ParseError("expected " + std::to_string(rows) + " rows, got " +
                       std::to_string(got));
    }
    if (blank(line)) continue;
    std::istringstream ls(line);
    std::string tok;
    std::size_t count = 0;
    while (ls >> tok) {
      data.push_back(parse_value(tok));
      ++count;
    }
    if (count != cols) {
      throw ParseError("row " + std::to_string(got + 1) + " has " +
                       std::to_string(count) + " values, expected " +
                       std::to_string(cols));
    }
    ++got;
  }
  while (std::getline(is, line)) {
    if (!blank(line)) throw ParseError("trailing content after matrix rows");
  }
  return Matrix(rows, cols, std::move(data));
}

Matrix read_matrix(std::istream& is) {
  std::string line;
  while (std::getline(is, line) && blank(line)) {
  }
  if (!is && line.empty()) throw ParseError("missing matrix header");
  std::istringstream hs(line);
  std::string r, c, extra;
  if (!(hs >> r >> c) || (hs >> extra)) {
    throw ParseError("matrix header must be '<rows> <cols>'");
  }
  return read_matrix_body(is, parse_count(r), parse_count(c));
}

}  // namespace gchol
