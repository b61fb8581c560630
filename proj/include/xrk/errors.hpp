#pragma once

#include <stdexcept>
#include <string>

namespace xrk {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-square or mismatched operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite input to a kernel.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Request outside the supported range (phi index, stage count, ...).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// A method needs something the system does not provide (e.g. a Jacobian action).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration (non-integral step count, bad grid size, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The reference oracle could not certify its own accuracy.
class OracleError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf appeared while stepping.
class BlowUpError : public Error {
 public:
  explicit BlowUpError(double t)
      : Error("non-finite state encountered at t = " + std::to_string(t)), time_(t) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace xrk
