#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gchol {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// Jacobi iteration hit its sweep cap without meeting the tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// A hypothesis guarding a perturbation bound does not hold.
class ConditionViolated : public Error {
 public:
  ConditionViolated(std::string condition, const std::string& what)
      : Error(what), condition_(std::move(condition)) {}

  const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

/// Cholesky breakdown. `pivot` is 1-based.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(std::size_t pivot, const std::string& what)
      : Error(what), pivot_(pivot) {}

  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

}  // namespace gchol
