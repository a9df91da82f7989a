#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hurstlab {

// Base of every error the library raises. The CLI maps all of these to
// exit code 2 (data/domain error).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A distribution or configuration parameter outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// An input value outside the domain of an operation (nonpositive price,
// lag beyond the series, non-finite observation, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

// Fewer than two admissible scales for a log-log regression.
class InsufficientScalesError : public Error {
 public:
  using Error::Error;
};

// The series carries no fluctuation at some scale (constant input, ...).
class DegenerateSeriesError : public Error {
 public:
  explicit DegenerateSeriesError(const std::string& what)
      : Error("degenerate series: " + what) {}
};

// Zero spread of log-scales in a regression.
class DegenerateRegressionError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class OrderingError : public Error {
 public:
  OrderingError(const std::string& what, std::size_t line)
      : Error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Every replication of a Monte Carlo cell failed.
class CellFailureError : public Error {
 public:
  CellFailureError(const std::string& what, std::size_t failed)
      : Error(what), failed_(failed) {}
  std::size_t failed() const noexcept { return failed_; }

 private:
  std::size_t failed_;
};

class EmptyResultError : public Error {
 public:
  using Error::Error;
};

}  // namespace hurstlab
