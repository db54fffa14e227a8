#include "invariset/oracle.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>


#include "invariset/certify.hpp"
#include "invariset/model.hpp"

namespace invariset::oracle {

std::vector<Vec> simulate(const SystemModel& s, const Vec& x0, const Word& word) {
  if (x0.size() != s.n) throw DimensionMismatch("initial state dimension mismatch");
  std::vector<Vec> traj;
  traj.reserve(word.size() + 1);
  traj.push_back(x0);
  for (int idx : word) {
    if (idx < 0 || idx >= static_cast<int>(s.modes.size()))
      throw DimensionMismatch("mode index outside the mode set");
    traj.push_back(s.modes[idx] * traj.back());
  }
  return traj;
}

std::vector<Vec> simulate(const SystemModel& s, const Vec& x0, int length) {
  if (s.modes.size() != 1)
    throw ValidationError("length-based simulation needs a single mode");
  return simulate(s, x0, Word(static_cast<std::size_t>(std::max(0, length)), 0));
}

std::vector<Vec> simulate(const TransformedSystem& s, const Vec& x0, int length) {
  if (s.inner.modes.size() != 1)
    throw ValidationError("transformed simulation needs a single mode");
  if (x0.size() != s.inner.n) throw DimensionMismatch("initial state dimension mismatch");
  std::vector<Vec> traj;
  traj.reserve(length + 1);
  traj.push_back(x0);
  for (int t = 0; t < length; ++t)
    traj.push_back(s.map.inverse(s.inner.modes.front() * s.map.forward(traj.back())));
  return traj;
}

GridScan grid_membership_scan(const InvariantSetDescription& desc,
                              const std::vector<std::pair<double, double>>& box,
                              int resolution) {
  if (static_cast<Eigen::Index>(box.size()) != desc.n_input)
    throw DimensionMismatch("scan box dimension mismatch");
  if (resolution < 1) throw ValidationError("resolution must be at least 1");
  GridScan scan;
  scan.box = box;
  scan.resolution = resolution;
  const int n = static_cast<int>(box.size());
  long total = 1;
  for (int i = 0; i < n; ++i) total *= resolution;
  scan.verdicts.resize(total);
  std::vector<int> idx(n, 0);
  Vec x(n);
  for (long flat = 0; flat < total; ++flat) {
    long rem = flat;
    for (int i = n - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(rem % resolution);
      rem /= resolution;
    }
    for (int i = 0; i < n; ++i) {
      const auto [lo, hi] = box[i];
      x(i) = resolution == 1 ? lo : lo + (hi - lo) * idx[i] / (resolution - 1);
    }
    scan.verdicts[flat] = membership(desc, x) ? 1 : 0;
  }
  return scan;
}

double brute_force_r(const HomForm& Q, std::span<const HomForm> S,
                     std::pair<double, double> tau_box, int steps) {
  if (S.size() > 3)
    throw TooManyFamilyMembers("grid search supports at most 3 family members");
  if (S.empty()) throw ValidationError("family must be nonempty");
  if (steps < 2) throw ValidationError("need at least 2 grid steps");
  const auto [lo, hi] = tau_box;
  const int m = static_cast<int>(S.size());
  Vec tau = Vec::Zero(m);
  std::vector<int> idx(m, 0);
  double best = std::numeric_limits<double>::infinity();
  long total = 1;
  for (int j = 0; j < m; ++j) total *= steps;
  for (long flat = 0; flat < total; ++flat) {
    long rem = flat;
    for (int j = m - 1; j >= 0; --j) {
      idx[j] = static_cast<int>(rem % steps);
      rem /= steps;
    }
    for (int j = 0; j < m; ++j) tau(j) = lo + (hi - lo) * idx[j] / (steps - 1);
    best = std::min(best, evaluate_r(Q, S, tau));
  }
  return best;
}

namespace {

constexpr double kWorkingBox = 1e6;

using Polygon = std::vector<Vec>;

/// Sutherland-Hodgman clip of a convex polygon by a'x <= b.
Polygon clip(const Polygon& poly, const Vec& a, double b) {
  Polygon out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec& p = poly[i];
    const Vec& q = poly[(i + 1) % n];
    const double dp = a.dot(p) - b;
    const double dq = a.dot(q) - b;
    if (dp <= 0.0) out.push_back(p);
    if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) {
      const double t = dp / (dp - dq);
      out.push_back(p + t * (q - p));
    }
  }
  // Drop near-duplicate vertices.
  Polygon clean;
  for (const Vec& v : out) {
    if (!clean.empty() && (v - clean.back()).norm() < 1e-12 * kWorkingBox) continue;
    clean.push_back(v);
  }
  while (clean.size() > 1 &&
         (clean.front() - clean.back()).norm() < 1e-12 * kWorkingBox)
    clean.pop_back();
  return clean;
}

Polygon initial_polytope(const std::vector<Vec>& q) {
  Polygon poly = {Vec(2), Vec(2), Vec(2), Vec(2)};
  poly[0] << -kWorkingBox, -kWorkingBox;
  poly[1] << kWorkingBox, -kWorkingBox;
  poly[2] << kWorkingBox, kWorkingBox;
  poly[3] << -kWorkingBox, kWorkingBox;
  for (const Vec& qi : q) {
    if (qi.size() != 2) throw DimensionMismatch("polytope baseline is 2-D only");
    poly = clip(poly, 2.0 * qi, 1.0);
    if (poly.empty()) throw ValidationError("constraint set is empty");
  }
  for (const Vec& v : poly)
    if (v.cwiseAbs().maxCoeff() >= 0.99 * kWorkingBox)
      throw ValidationError("constraint set is unbounded");
  return poly;
}

}  // namespace

std::vector<Vec> polytope_vertices_2d(const std::vector<Vec>& q) {
  return initial_polytope(q);
}

int polyhedral_kmin_2d(const std::vector<Vec>& q, const Mat& A) {
  if (A.rows() != 2 || A.cols() != 2)
    throw DimensionMismatch("polyhedral baseline is 2-D only");
  if (spectral_radius(A) >= 1.0 - 1e-9)
    throw Unstable("polyhedral baseline needs a Schur-stable mode");
  Polygon poly = initial_polytope(q);
  Mat power = A;  // A^{k+1} at iteration k
  for (int k = 0; k <= 10000; ++k) {
    bool redundant = true;
    for (const Vec& qi : q) {
      const Vec face = 2.0 * (power.transpose() * qi);
      double worst = -std::numeric_limits<double>::infinity();
      for (const Vec& v : poly) worst = std::max(worst, face.dot(v));
      if (worst > 1.0 + 1e-9) {
        redundant = false;
        break;
      }
    }
    if (redundant) return k;
    for (const Vec& qi : q) {
      poly = clip(poly, 2.0 * (power.transpose() * qi), 1.0);
      if (poly.empty()) throw ValidationError("iteration emptied the constraint set");
    }
    power = A * power;
  }
  throw IterationBudgetExceeded("polyhedral baseline did not stabilize");
}

double jsr_upper_bound(const std::vector<Mat>& modes, int depth) {
  if (modes.empty()) throw ValidationError("need at least one mode");
  if (depth < 1) throw ValidationError("depth must be at least 1");
  const Eigen::Index n = modes.front().rows();
  for (const Mat& m : modes)
    if (m.rows() != n || m.cols() != n)
      throw DimensionMismatch("mode dimensions are inconsistent");

  auto norm2 = [](const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(m.transpose() * m, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  };

  double bound = std::numeric_limits<double>::infinity();
  std::vector<Mat> level = {Mat::Identity(n, n)};
  constexpr std::size_t kMaxProducts = 200000;
  for (int k = 1; k <= depth; ++k) {
    if (level.size() * modes.size() > kMaxProducts) break;
    std::vector<Mat> next;
    next.reserve(level.size() * modes.size());
    double level_max = 0.0;
    for (const Mat& p : level)
      for (const Mat& m : modes) {
        next.push_back(m * p);
        level_max = std::max(level_max, norm2(next.back()));
      }
    bound = std::min(bound, std::pow(level_max, 1.0 / k));
    level = std::move(next);
  }
  return bound;
}

ProblemSpec random_switched_instance(int n, std::uint64_t seed) {
  if (n < 2) throw ValidationError("benchmark instances need n >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  auto draw_matrix = [&](int rows, int cols) {
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = u(rng);
    return m;
  };
  auto draw_vector = [&](int size) {
    Vec v(size);
    for (int i = 0; i < size; ++i) v(i) = u(rng);
    return v;
  };

  const Mat a1 = draw_matrix(n, n);
  const Mat a2 = draw_matrix(n, n);
  const double scale = jsr_upper_bound({a1, a2}, 8) + 0.1;

  ProblemSpec spec;
  spec.system = SystemModel({a1 / scale, a2 / scale});

  QuadraticConstraint ball;
  ball.Q = SymMat(Mat::Identity(n, n));
  ball.q = Vec::Zero(n);
  spec.quad.push_back(std::move(ball));
  for (int c = 0; c < 2; ++c) {
    const Mat raw = draw_matrix(n, n);
    QuadraticConstraint qc;
    qc.Q = SymMat(0.5 * (raw + raw.transpose()));
    qc.q = draw_vector(n);
    spec.quad.push_back(std::move(qc));
  }
  return spec;
}

}  // namespace invariset::oracle
