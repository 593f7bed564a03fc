#pragma once

#include <stdexcept>
#include <string>

namespace dhfair {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  /// Short machine-readable category, e.g. "parse" or "invalid".
  virtual const char* kind() const noexcept { return "error"; }
};

/// Malformed input file (topology JSON, demand CSV, QUBO text).
class ParseError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "parse"; }
};

/// A domain invariant or precondition does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid"; }
};

/// A solver was asked for more than its configured size limit.
class CapacityExceeded : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "capacity"; }
};

}  // namespace dhfair
