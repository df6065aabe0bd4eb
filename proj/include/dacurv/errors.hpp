#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dacurv {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on user-supplied data was violated.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Malformed text; line and column are 1-based.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : InputError(what), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Two computation paths disagreed, or a proven invariant was observed to fail.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace dacurv
