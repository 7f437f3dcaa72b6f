#pragma once

#include <stdexcept>
#include <string>

namespace lba {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent experiment configuration (CLI exit status 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Operands of incompatible dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Data on which an estimator is undefined (zero Gram sum, singular kernel matrix).
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation was not met by the caller.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// A linear policy does not stabilize the loop it is applied to.
class NonStabilizingError : public Error {
 public:
  using Error::Error;
};

/// A bound was evaluated outside the parameter regime where it holds.
class OutOfRegimeError : public Error {
 public:
  using Error::Error;
};

}  // namespace lba
