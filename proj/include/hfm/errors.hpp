#pragma once

#include <stdexcept>
#include <string>

namespace hfm {

/// Malformed or out-of-range input (lattice strings, spin values, sector labels).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested computation exceeds a configured size cap.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Base for failures detected while computing: non-convergence, broken identities, violated bounds.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double best_estimate, double residual)
      : NumericalError(what), best_estimate_(best_estimate), residual_(residual) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double residual() const noexcept { return residual_; }

 private:
  double best_estimate_;
  double residual_;
};

class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& what, double value, double error_bound)
      : NumericalError(what), value_(value), error_bound_(error_bound) {}

  double value() const noexcept { return value_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double value_;
  double error_bound_;
};

/// Two routes that must agree (spin vs boson picture, two evaluations of a constant) do not.
class ConsistencyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// An inequality that is supposed to hold on the tested instance was found violated.
class BoundViolation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace hfm
