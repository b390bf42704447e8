#pragma once

#include <stdexcept>
#include <string>

namespace maxlrt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Matrix not symmetric / not positive semidefinite / wrong shape.
class MatrixError : public Error {
 public:
  using Error::Error;
};

/// Data that cannot support a statistic (no events, zero variance, ...).
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

/// find_root called on an interval without a sign change.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// Non-finite evaluations or failed convergence.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Unknown name (weight set, test, table id).
class LookupError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. Carries the 1-based line number when known.
class InputError : public Error {
 public:
  InputError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace maxlrt
