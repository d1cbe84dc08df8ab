#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace leafkit {

/// Base of every error the toolkit throws on bad input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition or invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Batch is well-formed but carries no information (constant columns, < 2 rows).
class DegenerateInputError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Malformed text input. Line and column are 1-based; 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace leafkit
