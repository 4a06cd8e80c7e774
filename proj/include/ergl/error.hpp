#pragma once

#include <stdexcept>
#include <string>

namespace ergl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument values (probabilities, sizes, mismatched inputs).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Input outside the mathematical domain of an operation (e.g. inverse of 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Index or identifier out of range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent or infeasible design configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace ergl
