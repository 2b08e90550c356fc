#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scriptgap {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input. `line()` is 1-based, or 0 when the error is not tied
/// to a particular line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that violates a semantic invariant (dangling
/// reference, mismatched query sets, non-finite loss, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace scriptgap
