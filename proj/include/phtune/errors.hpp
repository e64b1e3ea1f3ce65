#pragma once

#include <stdexcept>
#include <string>

namespace phtune {

/// Malformed arguments: dimension mismatches, out-of-range options,
/// unparseable or contradictory configuration.
struct InputError : std::invalid_argument {
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A structural property of a model or target does not hold where it must
/// (mass matrix not SPD, shaped potential not stationary at the goal, ...).
struct ModelInvariantError : std::runtime_error {
  explicit ModelInvariantError(const std::string& what) : std::runtime_error(what) {}
};

/// Requested gains fail an admissibility condition (indefinite damping,
/// inadmissible coupling gain, ...).
struct AdmissibilityError : std::runtime_error {
  explicit AdmissibilityError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: factorization breakdown, infeasible bisection,
/// diverging integration.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// The operation is only defined for a narrower class of systems than the
/// one supplied (e.g. a result that requires zero gyroscopic coupling).
struct ScopeError : std::runtime_error {
  explicit ScopeError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace phtune
