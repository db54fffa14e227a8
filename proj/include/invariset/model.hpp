#pragma once

#include <optional>
#include <string>
#include <vector>

#include "invariset/types.hpp"

namespace invariset {

/// Embeds x'Qx + 2q'x <= 1 as the homogeneous form [[Q, q], [q', -1]].
HomForm homogenize_quadratic(const QuadraticConstraint& c);

/// Upper envelope form [[ (L/2)I, grad0/2 ], [ grad0'/2, h0 - 1 ]].
HomForm homogenize_upper(const QuasiSmoothConstraint& c);

/// Lower envelope form: same with -(L/2)I in the curvature block.
HomForm homogenize_lower(const QuasiSmoothConstraint& c);

/// Block-diag(A, 1), so that augment_mode(A) * (x,1) == (Ax, 1).
Mat augment_mode(const Mat& A);

/// Returns the input unchanged when some Q is positive definite (minimum
/// eigenvalue > 1e-10); otherwise prepends the ball constraint (1/dx)||x||^2
/// <= 1. Throws MissingBallBound when the ball is needed and dx is absent.
std::vector<QuadraticConstraint> ensure_ball(std::vector<QuadraticConstraint> quad,
                                             std::optional<double> dx);

struct StabilityReport {
  double spectral_radius = 0.0;  // single mode
  double jsr_bound = 0.0;        // product-norm upper bound, several modes
  bool single_mode = true;
  std::vector<std::string> warnings;
};

/// Single mode: computes the spectral radius and throws Unstable when it is
/// >= 1 - 1e-9. Several modes: reports a crude JSR upper bound; a bound >= 1
/// only yields a warning since the bound is not tight.
StabilityReport validate_system(const SystemModel& s);

/// Divides Q and q by the right-hand side. Throws ValidationError for rhs <= 0.
QuadraticConstraint normalize_quadratic(const SymMat& Q, const Vec& q, double rhs);

/// Largest eigenvalue magnitude of a general square matrix.
double spectral_radius(const Mat& A);

/// Structural and assumption checks on a full problem: consistent dimensions,
/// at least one constraint, dx presence/validity, origin strictly inside the
/// constraint set, sampled envelope check for quasi-smooth constraints, and
/// sampled round-trip checks for the transform. Throws on failure.
void validate_problem(const ProblemSpec& spec);

/// Radius r with the quad set contained in ||x|| <= r, from dx or a positive
/// definite member. Used to place validation samples.
double bounding_radius(const std::vector<QuadraticConstraint>& quad,
                       std::optional<double> dx);

/// Deterministic low-discrepancy points in the ball of radius `radius`,
/// filtered to the quad set; used by envelope and dx validation.
std::vector<Vec> validation_samples(const std::vector<QuadraticConstraint>& quad,
                                    std::optional<double> dx, int count = 256);

}  // namespace invariset
