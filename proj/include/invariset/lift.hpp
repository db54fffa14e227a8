#pragma once

#include <map>
#include <vector>

#include "invariset/types.hpp"

namespace invariset {

/// Monomial basis z = (x^[1], ..., x^[dbar]) with dbar = ceil(d/2).
///
/// Ordering is graded, decreasing-lexicographic within a grade, except grade 2
/// in dimension 2 which uses (x1*x2, x1^2, x2^2); see monomial_basis().
struct MonomialBasis {
  int n = 0;
  int d = 0;
  int dbar = 0;
  int N = 0;
  std::vector<std::vector<int>> exponents;       // position -> multi-index
  std::map<std::vector<int>, int> index;         // multi-index -> position
};

/// Quadratic-constraint image of a problem under the monomial lift.
struct LiftedProblem {
  SystemModel tilde;                      // z+ = tildeA z, block-diagonal by grade
  std::vector<QuadraticConstraint> xz;    // embedded originals, rewritten
                                          // polynomials, then the ||z||^2 ball
  MonomialBasis basis;
  double dz = 0.0;
};

/// Basis for degree-d polynomials; requires d >= 3 (lower degrees are handled
/// by the quadratic pipeline directly). N = sum_{l=1}^{dbar} C(n+l-1, l).
MonomialBasis monomial_basis(int n, int d);

/// z[position of alpha] = prod_i x_i^alpha_i.
Vec lift_vector(const Vec& x, const MonomialBasis& basis);

/// Matrix tildeA with lift_vector(Ax) == tildeA * lift_vector(x); block
/// diagonal over grades.
Mat lift_map(const Mat& A, const MonomialBasis& basis);

/// Rewrites H(x) = z'Pz + 2F'x. The splitting of each monomial across factor
/// pairs is canonical but not unique; correctness is by evaluation.
std::pair<SymMat, Vec> polynomial_to_quadratic(const PolynomialConstraint& poly,
                                               const MonomialBasis& basis);

/// Assembles the lifted single-mode problem: embedded quadratic constraints,
/// rewritten polynomial constraints, and the ball ||z||^2 <= dz with
/// dz = sum_{l=1}^{dbar} dx^l.
LiftedProblem build_lifted_problem(const SystemModel& system,
                                   const std::vector<QuadraticConstraint>& quad,
                                   const std::vector<PolynomialConstraint>& polys,
                                   double dx);

}  // namespace invariset
