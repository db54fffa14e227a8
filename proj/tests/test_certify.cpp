#include "invariset/certify.hpp"

#include <algorithm>
#include <random>

#include "doctest.h"
#include "invariset/errors.hpp"
#include "invariset/oracle.hpp"
#include "support/jacobi.hpp"

using namespace invariset;

namespace {

HomForm diag_form(std::initializer_list<double> entries) {
  Mat m = Mat::Zero(static_cast<Eigen::Index>(entries.size()),
                    static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (double e : entries) m(i, i) = e, ++i;
  return HomForm{SymMat(m)};
}

Mat random_symmetric(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = u(rng);
  return 0.5 * (m + m.transpose());
}

/// Random family member shaped like a homogenized constraint: strictly
/// negative corner entry keeps the certificate objective coercive.
HomForm random_member(int n, std::mt19937_64& rng) {
  Mat m = random_symmetric(n, rng);
  std::uniform_real_distribution<double> u(0.3, 1.0);
  m(n - 1, n - 1) = -u(rng);
  return HomForm{SymMat(m)};
}

Vec tau1(double v) {
  Vec t(1);
  t << v;
  return t;
}

}  // namespace

TEST_CASE("lambda_max on simple matrices") {
  auto [v1, vec1] = lambda_max(diag_form({3, -1}).mat);
  CHECK(v1 == doctest::Approx(3.0));
  CHECK(std::abs(vec1(0)) == doctest::Approx(1.0));

  Mat flip(2, 2);
  flip << 0, 1, 1, 0;
  auto [v2_, vec2] = lambda_max(SymMat(flip));
  CHECK(v2_ == doctest::Approx(1.0));
  CHECK(std::abs(vec2(0)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  CHECK(vec2.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lambda_max matches the Jacobi sweep reference") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat m = random_symmetric(5, rng, 2.0);
    const auto reference = testsupport::jacobi_eigenvalues(m);
    auto [value, vec] = lambda_max(SymMat(m));
    CHECK(value == doctest::Approx(reference.back()).epsilon(1e-10));
    // Rayleigh quotient of the returned vector reproduces the value.
    CHECK(vec.dot(m * vec) == doctest::Approx(value).epsilon(1e-9));
  }
}

TEST_CASE("evaluate_r closed forms") {
  const HomForm q = diag_form({0.25, -1});
  const std::vector<HomForm> s = {diag_form({1, -1})};
  CHECK(evaluate_r(q, s, Vec::Zero(1)) == doctest::Approx(0.25));
  CHECK(evaluate_r(q, s, tau1(0.625)) == doctest::Approx(-0.375));
  CHECK(evaluate_r(s[0], s, tau1(1.0)) == doctest::Approx(0.0));
  CHECK_THROWS_AS(evaluate_r(q, s, Vec::Zero(2)), DimensionMismatch);
}

TEST_CASE("solve_certificate on 1-D families") {
  SolverOptions opts;
  const std::vector<HomForm> s = {diag_form({1, -1})};

  // Grid reference over tau in [0,2]: min of max(0.25-t, t-1) is at 0.625.
  double grid_min = 1e300;
  for (int i = 0; i <= 20000; ++i) {
    const double t = 2.0 * i / 20000;
    grid_min = std::min(grid_min, std::max(0.25 - t, t - 1.0));
  }
  CHECK(grid_min == doctest::Approx(-0.375).epsilon(1e-3));

  SolverOptions exact = opts;
  exact.stop_at_certified = false;
  Certificate full = solve_certificate(diag_form({0.25, -1}), s, exact);
  CHECK(full.certified());
  CHECK(full.value == doctest::Approx(grid_min).epsilon(1e-6));
  CHECK(full.weights(0) == doctest::Approx(0.625).epsilon(1e-3));

  Certificate self = solve_certificate(s[0], s, opts);
  CHECK(self.certified());
  CHECK(self.value == doctest::Approx(0.0));
  CHECK(self.weights(0) == doctest::Approx(1.0));

  Certificate off = solve_certificate(diag_form({4, -1}), s, exact);
  CHECK_FALSE(off.certified());
  CHECK(off.value == doctest::Approx(1.5).epsilon(1e-4));
  CHECK(off.weights(0) == doctest::Approx(2.5).epsilon(1e-2));
}

TEST_CASE("certificates re-validate from stored weights") {
  std::mt19937_64 rng(33);
  SolverOptions opts;
  int certified_count = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 2);
    std::vector<HomForm> family;
    const int m = 1 + static_cast<int>(rng() % 3);
    for (int j = 0; j < m; ++j) family.push_back(random_member(n, rng));
    HomForm target{SymMat(random_symmetric(n, rng) -
                          0.4 * Mat::Identity(n, n) * (trial % 2))};
    Certificate cert = solve_certificate(target, family, opts);
    CHECK((cert.weights.array() >= 0.0).all());
    if (cert.certified()) {
      ++certified_count;
      const double check = evaluate_r(target, family, cert.weights);
      CHECK(check <= opts.eps_cert * (1.0 + target.mat.frobenius()) + 1e-15);
    }
  }
  CHECK(certified_count > 0);  // the trial mix must exercise both outcomes
}

TEST_CASE("monotonicity: enlarging the family never hurts") {
  std::mt19937_64 rng(55);
  SolverOptions opts;
  opts.stop_at_certified = false;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3;
    std::vector<HomForm> small;
    small.push_back(random_member(n, rng));
    small.push_back(random_member(n, rng));
    std::vector<HomForm> large = small;
    large.push_back(random_member(n, rng));
    HomForm target{SymMat(random_symmetric(n, rng))};

    Certificate c_small = solve_certificate(target, small, opts);
    Vec embedded = Vec::Zero(3);
    embedded.head(2) = c_small.weights;
    CHECK(evaluate_r(target, large, embedded) ==
          doctest::Approx(c_small.value).epsilon(1e-12));
    Certificate c_large = solve_certificate(target, large, opts);
    CHECK(c_large.value <= c_small.value + 1e-7);
  }
}

TEST_CASE("solver value matches the tau-grid oracle") {
  std::mt19937_64 rng(77);
  SolverOptions opts;
  opts.stop_at_certified = false;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    std::vector<HomForm> family = {random_member(n, rng), random_member(n, rng)};
    HomForm target{SymMat(random_symmetric(n, rng, 0.5))};
    Certificate cert = solve_certificate(target, family, opts);

    double coarse = oracle::brute_force_r(target, family, {0.0, 10.0}, 101);
    CHECK(cert.value <= coarse + 1e-9);
    CHECK(std::abs(cert.value - coarse) <= 2e-1);  // coarse grid resolution
  }
}

TEST_CASE("eigenvalue objective is convex with eigenvector subgradients") {
  // evaluate_r is convex in tau and, at points with a simple top eigenvalue,
  // differentiable with d/dtau_j = -v' S_j v for the top eigenvector v.
  std::mt19937_64 rng(91);
  SolverOptions opts;
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 3;
    std::vector<HomForm> family = {random_member(n, rng), random_member(n, rng)};
    HomForm target{SymMat(random_symmetric(n, rng))};
    std::uniform_real_distribution<double> u(0.1, 2.0);
    Vec tau(2);
    tau << u(rng), u(rng);

    // Convexity along random segments.
    Vec tau2(2);
    tau2 << u(rng), u(rng);
    const double mid = evaluate_r(target, family, 0.5 * (tau + tau2));
    CHECK(mid <= 0.5 * evaluate_r(target, family, tau) +
                     0.5 * evaluate_r(target, family, tau2) + 1e-12);

    // Finite-difference gradient check where the top eigenvalue is simple.
    Mat assembled = target.mat.mat();
    for (int j = 0; j < 2; ++j) assembled -= tau(j) * family[j].mat.mat();
    Eigen::SelfAdjointEigenSolver<Mat> es(assembled);
    if (es.eigenvalues()(n - 1) - es.eigenvalues()(n - 2) < 1e-4) continue;
    const Vec v = es.eigenvectors().col(n - 1);
    const double h = 1e-6;
    for (int j = 0; j < 2; ++j) {
      Vec hi = tau, lo = tau;
      hi(j) += h;
      lo(j) -= h;
      const double fd = (evaluate_r(target, family, hi) -
                         evaluate_r(target, family, lo)) /
                        (2 * h);
      const double analytic = -v.dot(family[j].mat.mat() * v);
      CHECK(fd == doctest::Approx(analytic).epsilon(1e-5));
    }
  }
}

TEST_CASE("prune_family removes dominated members") {
  SolverOptions opts;
  const HomForm base = diag_form({1, -1});
  const HomForm doubled{SymMat(2.0 * base.mat.mat())};

  auto scaled = prune_family(std::vector<HomForm>{base, doubled}, opts);
  CHECK(scaled.retained.size() == 1);
  CHECK(scaled.removed.size() == 1);

  auto single = prune_family(std::vector<HomForm>{base}, opts);
  CHECK(single.retained == std::vector<int>{0});

  auto pair = prune_family(std::vector<HomForm>{base, diag_form({0.25, -1})}, opts);
  CHECK(pair.retained == std::vector<int>{0});
  REQUIRE(pair.removed.size() == 1);
  CHECK(pair.removed[0].first == 1);
  CHECK(pair.removed[0].second.weights(0) == doctest::Approx(0.625).epsilon(0.3));
}
