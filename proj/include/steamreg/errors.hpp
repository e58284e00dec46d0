#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace steamreg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. `line` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SchemaError : public ParseError {
 public:
  using ParseError::ParseError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

class ConstantColumnError : public Error {
 public:
  ConstantColumnError(const std::string& what, std::size_t column)
      : Error(what), column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

// Raised when an input point is outside every membership function support.
class NoFiringError : public Error {
 public:
  using Error::Error;
};

// A trainer hit a non-finite loss or otherwise could not continue.
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace steamreg
