#pragma once

#include <stdexcept>
#include <string>

namespace chemlab {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a formula (p <= 1, l outside (0,1), ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Request outside the hypotheses of the boundedness theorem (n < 3, wrong gamma class).
class ScopeError : public Error {
 public:
  using Error::Error;
};

/// Field length does not match the grid.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A value violates an invariant of a domain type.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration document; carries the 1-based line number (0 if not line-specific).
class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace chemlab
