#pragma once

#include <stdexcept>
#include <string>

namespace fbmrate {

// Bad user input: parameters out of range, malformed configs, off-grid
// evaluation points. The CLI maps these to exit status 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation called outside the domain where its formula is defined
// (log of a nonpositive atom, fractional derivative at x = 0, ...).
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A coarse sum was requested on a grid that does not divide the path grid.
class GridMismatchError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Caller violated a documented precondition that is not a plain range
// check, e.g. requesting the pathwise chain-rule oracle for H = 1/2.
class ContractViolation : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Monte Carlo estimate too noisy to be used for a rate fit.
class InsufficientReplicates : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Internal consistency failure: a covariance that is not positive
// definite, a violated certificate inequality, disagreeing oracles.
// The CLI maps these to exit status 2.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureError : public ConsistencyError {
 public:
  QuadratureError(const std::string& what, double estimate, double error_estimate)
      : ConsistencyError(what), estimate_(estimate), error_estimate_(error_estimate) {}

  double estimate() const noexcept { return estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double estimate_;
  double error_estimate_;
};

// File-system failures (unwritable destination, missing directory). The
// message names the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fbmrate
