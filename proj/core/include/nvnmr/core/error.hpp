#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace nvnmr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a domain-type invariant (negative depth, unsorted grid, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration: unknown key, wrong type, missing field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `where()` is "file:line" when known.
class ParseError : public Error {
 public:
  ParseError(std::string where, const std::string& what)
      : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}

  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// A least-squares fit (background or depth) could not produce an estimate.
class FitError : public Error {
 public:
  using Error::Error;
};

/// The dip is too shallow compared to the noise to constrain a depth.
class InsufficientSignal : public FitError {
 public:
  using FitError::FitError;
};

/// The Monte Carlo bath region is too small for the requested accuracy.
class TruncationError : public Error {
 public:
  using Error::Error;
};

}  // namespace nvnmr
