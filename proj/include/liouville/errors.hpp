#pragma once

#include <stdexcept>
#include <string>

namespace liouville {

// Input rejected before any numerics ran (bad parameters, unknown names,
// malformed files). The CLI maps these to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A mathematical precondition failed: the operation is undefined for the
// given data (singular point of a map, unbounded tail, |phi| > 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A numerical procedure did not deliver its contract (non-convergence,
// singular system, contraction failure). The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Newton met a (numerically) singular Hessian.
class DegenerateStepError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Newton iterate left the open half-plane.
class BoundaryEscapeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Vector field too small on a contour for the winding number to be defined.
class DegreeUndefinedError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Fixed-point map failed to contract; eps is outside the perturbative regime.
class EpsTooLargeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace liouville
