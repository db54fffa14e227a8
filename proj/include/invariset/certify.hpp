#pragma once

#include <span>
#include <utility>
#include <vector>

#include "invariset/types.hpp"

namespace invariset {

enum class CertStatus { Certified, NotCertified };

/// Result of one inclusion certificate solve: min r s.t. Q <= sum tau_j S_j + rI,
/// tau >= 0, solved as minimization of lambda_max(Q - sum tau_j S_j).
struct Certificate {
  CertStatus status = CertStatus::NotCertified;
  double value = 0.0;  // best achieved r
  Vec weights;         // nonnegative, aligned with the family
  int iterations = 0;  // objective evaluations used

  bool certified() const { return status == CertStatus::Certified; }
};

/// Largest eigenvalue and a unit eigenvector of a symmetric matrix.
std::pair<double, Vec> lambda_max(const SymMat& m);

/// lambda_max(Q - sum_j tau_j S_j): the smallest r making (r, tau) feasible.
double evaluate_r(const HomForm& Q, std::span<const HomForm> S, const Vec& tau);

/// Projected subgradient descent over tau >= 0 with Polyak-style steps and
/// seeded restarts. Certified means a tau with
///   evaluate_r(Q, S, tau) <= eps_cert * (1 + ||Q||_F)
/// was found; the weights are stored so the claim is re-checkable. A
/// NotCertified result carries the best value found, which is an upper bound
/// on the true optimum, not a proof of infeasibility.
Certificate solve_certificate(const HomForm& Q, std::span<const HomForm> S,
                              const SolverOptions& opts,
                              const Vec* warm_start = nullptr);

struct PruneResult {
  std::vector<int> retained;  // indices into the input family, original order
  /// (index, certificate vs. the retained set at removal time).
  std::vector<std::pair<int, Certificate>> removed;
};

/// Removes members dominated by a nonnegative combination of the others.
/// Processed in insertion order against the current retained set, so the
/// output is irredundant with respect to that order.
PruneResult prune_family(std::span<const HomForm> S, const SolverOptions& opts);

}  // namespace invariset
