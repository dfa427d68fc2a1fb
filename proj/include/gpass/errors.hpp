#pragma once

#include <stdexcept>
#include <string>

namespace gpass {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched or unsupported dimensions (mode counts, matrix sizes, indices).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input violates a physical or structural invariant (e.g. uncertainty relation).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Numerical procedure failed to reach its tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Fock-space truncation too small for the requested state or operation.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, int suggested_cutoff = 0)
      : Error(what), suggested_cutoff_(suggested_cutoff) {}

  int suggested_cutoff() const noexcept { return suggested_cutoff_; }

 private:
  int suggested_cutoff_;
};

}  // namespace gpass
