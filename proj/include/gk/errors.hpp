#pragma once

#include <stdexcept>
#include <string>

namespace gk {

/// Argument outside the mathematical domain of a function (e.g. a density not in [0,1]).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Invalid model parameter (e.g. gamma with no double well).
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A boundary value problem with no solution for the requested data.
struct NoSolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Iterative numerics (quadrature, root find, eigensolver) failed to converge.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Enumeration or lattice size outside the supported range.
struct SizeError : std::length_error {
  using std::length_error::length_error;
};

/// Test function support incompatible with the lattice window.
struct SupportError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace gk
