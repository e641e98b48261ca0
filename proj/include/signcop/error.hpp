#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace signcop {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. `line()` is 1-based; 0 when not line-specific.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Argument outside a function's mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid hyperparameter or run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Shape mismatch or an index out of range.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Dense materialization requested above the size guard.
class SizeGuardError : public Error {
 public:
  using Error::Error;
};

// A numerical invariant that should hold for valid inputs was violated
// (non-PD capacitance matrix, non-finite loss, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace signcop
