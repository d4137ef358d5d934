#pragma once

#include <stdexcept>
#include <string>

namespace bilap {

// Parameters outside the admissible set of a formula or routine.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A closed-form exponent whose denominator vanishes.
class SingularFormulaError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Inputs violate a hypothesis required by the requested rule.
class HypothesisError : public DomainError {
 public:
  using DomainError::DomainError;
};

// The mountain-pass geometry could not be established.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative solver diverged, collapsed or ran out of iterations.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bilap
