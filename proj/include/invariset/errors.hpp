#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace invariset {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input data violates a structural precondition (shape, symmetry, schema).
struct ValidationError : Error {
  using Error::Error;
};

struct DimensionMismatch : ValidationError {
  using ValidationError::ValidationError;
};

/// No positive definite constraint is present and no ball radius was given.
struct MissingBallBound : ValidationError {
  using ValidationError::ValidationError;
};

/// Single-mode system with spectral radius >= 1.
struct Unstable : ValidationError {
  using ValidationError::ValidationError;
};

/// The outer iteration exceeded its budget without certifying termination.
struct IterationBudgetExceeded : Error {
  using Error::Error;
};

struct DegreeTooSmall : ValidationError {
  using ValidationError::ValidationError;
};

struct DegreeExceedsBasis : ValidationError {
  using ValidationError::ValidationError;
};

/// Brute-force grid search asked for a family too large to enumerate.
struct TooManyFamilyMembers : Error {
  using Error::Error;
};

struct ExprError : Error {
  using Error::Error;
};

struct ExprSyntaxError : ExprError {
  ExprSyntaxError(const std::string& msg, std::size_t pos)
      : ExprError(msg + " at position " + std::to_string(pos)), position(pos) {}
  std::size_t position;
};

struct UnknownVariable : ExprError {
  using ExprError::ExprError;
};

struct DomainError : ExprError {
  using ExprError::ExprError;
};

struct DivisionByZero : ExprError {
  using ExprError::ExprError;
};

struct NotPolynomial : ExprError {
  using ExprError::ExprError;
};

}  // namespace invariset
