#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dfl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class InvalidDimension : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class InfeasibleBox : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class InvalidAlpha : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class UnsupportedDimension : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Raised when an invariant that construction should have guaranteed fails.
class InternalInvariant : public Error {
 public:
  using Error::Error;
};

class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

class ConditioningError : public Error {
 public:
  using Error::Error;
};

class OracleDivergence : public Error {
 public:
  using Error::Error;
};

/// Confidence interval requested from fewer than two samples. Carries the
/// per-round mean, which is still well defined.
class CiUndefined : public Error {
 public:
  CiUndefined(const std::string& what, std::vector<double> mean)
      : Error(what), mean_(std::move(mean)) {}
  const std::vector<double>& mean() const noexcept { return mean_; }

 private:
  std::vector<double> mean_;
};

}  // namespace dfl
