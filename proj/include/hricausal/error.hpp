#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hricausal {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input or configuration violates a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Bus misuse: unknown or duplicate topic.
class TopicError : public Error {
 public:
  using Error::Error;
};

/// Payload kind does not match the topic it is published on.
class KindMismatchError : public Error {
 public:
  using Error::Error;
};

/// Malformed CSV or JSON input. `line()` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Not enough usable rows for the requested lag window and condition depth.
class BatchTooShortError : public Error {
 public:
  using Error::Error;
};

/// Synthetic system diverged during generation.
class UnstableSpecError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure that could not be recovered (e.g. singular kernel system).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace hricausal
