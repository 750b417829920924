#pragma once

#include <stdexcept>
#include <string>

namespace auctionmetrics {

/// Argument outside the domain of an operation (bad probability, empty sample, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Estimator parameters that cannot be honoured (underflow, inconsistent overrides).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An estimator or solver ran but could not produce a result.
class EstimatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative solver gave up; carries the best residual reached.
class ConvergenceError : public EstimatorError {
 public:
  ConvergenceError(const std::string& what, double best_residual)
      : EstimatorError(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

/// File could not be read, written, or parsed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace auctionmetrics
