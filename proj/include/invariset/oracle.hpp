#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "invariset/iterate.hpp"
#include "invariset/types.hpp"

namespace invariset::oracle {

/// States x0, A_{w0} x0, A_{w1} A_{w0} x0, ... (word in switching-signal order).
std::vector<Vec> simulate(const SystemModel& s, const Vec& x0, const Word& word);

/// Single-mode trajectory of the given length (length+1 states).
std::vector<Vec> simulate(const SystemModel& s, const Vec& x0, int length);

/// Nonlinear trajectory through the transform: x+ = Tinv(A T(x)).
std::vector<Vec> simulate(const TransformedSystem& s, const Vec& x0, int length);

struct GridScan {
  std::vector<std::pair<double, double>> box;  // per-axis [lo, hi]
  int resolution = 0;
  std::vector<std::uint8_t> verdicts;  // row-major, axis 0 slowest
};

/// Membership verdict on a regular grid.
GridScan grid_membership_scan(const InvariantSetDescription& desc,
                              const std::vector<std::pair<double, double>>& box,
                              int resolution);

/// Minimum of evaluate_r over a uniform tau-grid; an upper bound on the true
/// optimum that tightens with resolution. |S| <= 3.
double brute_force_r(const HomForm& Q, std::span<const HomForm> S,
                     std::pair<double, double> tau_box, int steps);

/// Vertices of the 2-D polytope {x : 2 q_i'x <= 1}, counterclockwise.
/// Throws ValidationError when the set is unbounded at the working box scale.
std::vector<Vec> polytope_vertices_2d(const std::vector<Vec>& q);

/// Exact polyhedral baseline for 2-D linear constraints: iterates half-space
/// preimages and returns the first k with O_{k+1} == O_k (vertex test with
/// 1e-9 snapping).
int polyhedral_kmin_2d(const std::vector<Vec>& q, const Mat& A);

/// min_{k <= depth} max_{|w| = k} ||A_w||_2^{1/k}; an upper bound on the joint
/// spectral radius, non-increasing in depth.
double jsr_upper_bound(const std::vector<Mat>& modes, int depth);

/// Seeded random switched benchmark instance: two modes with entries uniform
/// in [-1,1], scaled by (jsr bound + 0.1); constraints are the unit ball plus
/// two random quadratics.
ProblemSpec random_switched_instance(int n, std::uint64_t seed);

}  // namespace invariset::oracle
