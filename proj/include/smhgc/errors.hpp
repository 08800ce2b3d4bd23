#pragma once

#include <stdexcept>
#include <string>

namespace smhgc {

// Base of every error the library throws. The CLI maps the concrete
// subclasses onto its exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition or validation failure (bad shapes, bad arguments,
// infeasible requests).
class ContractError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public ContractError {
 public:
  using ContractError::ContractError;
};

// Homophily ratio requested on a matrix without off-diagonal edges.
class UndefinedRatioError : public ContractError {
 public:
  using ContractError::ContractError;
};

class FeasibilityError : public ContractError {
 public:
  FeasibilityError(const std::string& what, double min_hr, double max_hr)
      : ContractError(what), min_hr_(min_hr), max_hr_(max_hr) {}

  double min_achievable() const { return min_hr_; }
  double max_achievable() const { return max_hr_; }

 private:
  double min_hr_;
  double max_hr_;
};

// Missing or malformed files.
class IoError : public Error {
 public:
  using Error::Error;
};

class LoadError : public IoError {
 public:
  using IoError::IoError;
};

// Non-finite values encountered during training.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace smhgc
