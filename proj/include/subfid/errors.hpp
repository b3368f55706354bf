#pragma once

#include <stdexcept>
#include <string>

namespace subfid {

// Caller passed something malformed: wrong rank, bad index, inconsistent
// arguments. Maps to CLI exit code 1.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Paired tensor axes whose extents disagree.
class DimensionError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

// An operation needs a canonical-form state and did not get one.
class StateError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

// Requested object would exceed the brute-force size guard.
class CapacityError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

// Malformed or inconsistent network container on disk.
class LoadError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

// Numerical breakdown: non-convergent decomposition, non-finite values.
// Maps to CLI exit code 2.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Zero-norm state, or a truncation that would leave nothing.
class DegenerateStateError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Matrix expected to be positive semidefinite has an eigenvalue below the
// roundoff clip threshold.
class NotPsdError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace subfid
