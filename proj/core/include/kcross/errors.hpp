#pragma once

#include <stdexcept>
#include <string>

namespace kcross {

// Invalid scenario or distribution configuration (bad parameters, non-invertible cdf).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition of an operation does not hold for the given inputs.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the domain of a function (e.g. H(z) for z <= 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Base for numerical failures: non-convergence, degenerate processes.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// sigma = 0 or xi = 0 somewhere, or a mean profile that vanishes on an interval.
class DegenerateProcessError : public NumericError {
 public:
  using NumericError::NumericError;
};

// |mu| = 1 somewhere: the zero-count integral is not applicable.
class HypothesisError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Two routes that must agree by an identity disagree beyond tolerance.
class ConsistencyError : public NumericError {
 public:
  using NumericError::NumericError;
};

// f^{(l+1)} vanishes at a listed change point.
class DegenerateChangePointError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace kcross
