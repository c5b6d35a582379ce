#pragma once

#include <stdexcept>
#include <string>

namespace coulomb4 {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (x <= 0, eps >= 0, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// A denominator of a closed-form expression vanishes.
class SingularError : public Error {
public:
  using Error::Error;
};

/// Parameters do not satisfy the quasi-exact-solvability constraint.
class ConstraintViolation : public Error {
public:
  ConstraintViolation(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

/// Iterative solver exhausted its budget.
class NonConvergence : public Error {
public:
  NonConvergence(const std::string& what, double last_residual, int attempts = 1)
      : Error(what), last_residual_(last_residual), attempts_(attempts) {}
  double last_residual() const noexcept { return last_residual_; }
  int attempts() const noexcept { return attempts_; }

private:
  double last_residual_;
  int attempts_;
};

/// Exponent would overflow a double.
class OverflowError : public Error {
public:
  using Error::Error;
};

/// Finite-difference grid cannot resolve the requested states.
class GridTooCoarse : public Error {
public:
  GridTooCoarse(const std::string& what, double estimate) : Error(what), estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }

private:
  double estimate_;
};

}  // namespace coulomb4
