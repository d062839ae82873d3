#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ngar {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a documented precondition (shape mismatch, empty sample, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// The request is well formed but outside what the implementation supports.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// Singular systems, non-finite intermediates.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed file; carries the 1-based line (record) number where parsing failed.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ngar
