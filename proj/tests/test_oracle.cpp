#include "invariset/oracle.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "invariset/errors.hpp"
#include "invariset/expr.hpp"
#include "invariset/io.hpp"
#include "invariset/model.hpp"

using namespace invariset;
using namespace invariset::oracle;

namespace {

Mat m22(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

Vec v2(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

Mat rotation(double angle) {
  return m22(std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle));
}

HomForm diag_form(std::initializer_list<double> entries) {
  Mat m = Mat::Zero(static_cast<Eigen::Index>(entries.size()),
                    static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (double e : entries) m(i, i) = e, ++i;
  return HomForm{SymMat(m)};
}

}  // namespace

TEST_CASE("simulate linear trajectories") {
  SystemModel sys({0.5 * Mat::Identity(2, 2)});
  const Vec x0 = v2(1, -2);
  auto traj = simulate(sys, x0, 3);
  REQUIRE(traj.size() == 4);
  CHECK((traj[3] - 0.125 * x0).norm() == doctest::Approx(0.0));

  auto none = simulate(sys, x0, Word{});
  REQUIRE(none.size() == 1);
  CHECK((none[0] - x0).norm() == 0.0);

  SystemModel two({0.5 * Mat::Identity(2, 2), rotation(0.5)});
  auto mixed = simulate(two, x0, Word{1, 0});
  CHECK((mixed[2] - 0.5 * (rotation(0.5) * x0)).norm() == doctest::Approx(0.0));
}

TEST_CASE("simulate through a transform") {
  TransformedSystem sys;
  sys.inner = SystemModel({m22(0, 1, -0.8, 0)});
  sys.map.forward.f = [](const Vec& x) { return v2(x(0), 2 * x(0) * x(0) + x(1)); };
  sys.map.inverse.f = [](const Vec& y) { return v2(y(0), y(1) - 2 * y(0) * y(0)); };

  auto traj = simulate(sys, v2(0.1, 0.1), 1);
  REQUIRE(traj.size() == 2);
  CHECK(traj[1](0) == doctest::Approx(0.12).epsilon(1e-12));
  CHECK(traj[1](1) == doctest::Approx(-0.1088).epsilon(1e-12));
}

TEST_CASE("brute force grid reproduces closed forms") {
  const std::vector<HomForm> s = {diag_form({1, -1})};
  CHECK(brute_force_r(diag_form({0.25, -1}), s, {0.0, 2.0}, 2001) ==
        doctest::Approx(-0.375).epsilon(1e-3));
  CHECK(brute_force_r(s[0], s, {0.0, 2.0}, 2001) <= 1e-12);
  CHECK(brute_force_r(diag_form({4, -1}), s, {0.0, 5.0}, 5001) ==
        doctest::Approx(1.5).epsilon(1e-3));
  std::vector<HomForm> four(4, s[0]);
  CHECK_THROWS_AS(brute_force_r(diag_form({1, -1}), four, {0.0, 1.0}, 3),
                  TooManyFamilyMembers);
}

TEST_CASE("polyhedral baseline on boxes") {
  // Unit box as 2 q' x <= 1.
  std::vector<Vec> box = {v2(0.5, 0), v2(-0.5, 0), v2(0, 0.5), v2(0, -0.5)};
  CHECK(polyhedral_kmin_2d(box, 0.5 * rotation(M_PI / 2)) == 0);
  CHECK(polyhedral_kmin_2d(box, m22(0.99, 0, 0, 0.5)) == 0);

  // A rotation that sticks corners out needs iterations.
  const int k = polyhedral_kmin_2d(box, 0.9 * rotation(0.4));
  CHECK(k > 0);

  // Duplicated half-spaces change nothing.
  std::vector<Vec> doubled = box;
  doubled.insert(doubled.end(), box.begin(), box.end());
  CHECK(polyhedral_kmin_2d(doubled, 0.9 * rotation(0.4)) == k);

  CHECK_THROWS_AS(polyhedral_kmin_2d(box, m22(1.2, 0, 0, 0.5)), Unstable);
  CHECK_THROWS_AS(polyhedral_kmin_2d({v2(0.5, 0)}, 0.5 * rotation(1.0)),
                  ValidationError);  // unbounded set
}

TEST_CASE("polytope vertices") {
  std::vector<Vec> box = {v2(0.5, 0), v2(-0.5, 0), v2(0, 0.5), v2(0, -0.5)};
  auto verts = polytope_vertices_2d(box);
  CHECK(verts.size() == 4);
  double maxnorm = 0;
  for (const Vec& v : verts) maxnorm = std::max(maxnorm, v.lpNorm<Eigen::Infinity>());
  CHECK(maxnorm == doctest::Approx(1.0));
}

TEST_CASE("jsr upper bound") {
  CHECK(jsr_upper_bound({0.5 * Mat::Identity(2, 2)}, 1) == doctest::Approx(0.5));
  CHECK(jsr_upper_bound({Mat::Zero(2, 2), Mat::Zero(2, 2)}, 3) == doctest::Approx(0.0));

  // Normal single mode: bound equals the spectral radius already at depth 1.
  const Mat normal = 0.7 * rotation(0.3);
  CHECK(jsr_upper_bound({normal, normal}, 4) == doctest::Approx(0.7).epsilon(1e-9));

  // Non-normal mode: the bound is valid at every depth and tightens.
  const Mat shear = m22(0.5, 0.9, 0, 0.5);
  const double d1 = jsr_upper_bound({shear}, 1);
  const double d6 = jsr_upper_bound({shear}, 6);
  CHECK(d1 >= spectral_radius(shear) - 1e-12);
  CHECK(d6 >= spectral_radius(shear) - 1e-12);
  CHECK(d6 <= d1 + 1e-12);
}

TEST_CASE("random switched instances are reproducible and stable") {
  const ProblemSpec a = random_switched_instance(2, 99);
  const ProblemSpec b = random_switched_instance(2, 99);
  REQUIRE(a.system.modes.size() == 2);
  CHECK((a.system.modes[0] - b.system.modes[0]).norm() == 0.0);
  CHECK((a.system.modes[1] - b.system.modes[1]).norm() == 0.0);
  CHECK((a.quad[1].Q.mat() - b.quad[1].Q.mat()).norm() == 0.0);
  CHECK((a.quad[2].q - b.quad[2].q).norm() == 0.0);

  const ProblemSpec c = random_switched_instance(2, 100);
  CHECK((a.system.modes[0] - c.system.modes[0]).norm() > 0.0);

  for (int seed = 1; seed <= 10; ++seed) {
    const ProblemSpec spec = random_switched_instance(3, seed);
    for (const Mat& mode : spec.system.modes)
      CHECK(spectral_radius(mode) < 1.0);
    CHECK(jsr_upper_bound(spec.system.modes, 8) < 1.0);
    // First constraint is the unit ball.
    CHECK((spec.quad[0].Q.mat() - Mat::Identity(3, 3)).norm() == 0.0);
  }
}

TEST_CASE("grid membership scan") {
  ProblemSpec spec;
  spec.system = SystemModel({m22(1.0216, 0.3234, -0.6597, 0.5226)});
  QuadraticConstraint ball;
  ball.Q = SymMat(Mat::Identity(2, 2));
  ball.q = Vec::Zero(2);
  spec.quad.push_back(ball);
  RunResult r = run_algorithm1(spec, RunOptions{});

  auto far = grid_membership_scan(r.desc, {{5.0, 6.0}, {5.0, 6.0}}, 5);
  for (auto v : far.verdicts) CHECK(v == 0);

  auto origin = grid_membership_scan(r.desc, {{0.0, 0.0}, {0.0, 0.0}}, 3);
  CHECK(origin.verdicts.size() == 9);
  for (auto v : origin.verdicts) CHECK(v == 1);

  // The instance is symmetric under x -> -x.
  auto scan = grid_membership_scan(r.desc, {{-1.0, 1.0}, {-1.0, 1.0}}, 41);
  for (int i = 0; i < 41; ++i)
    for (int j = 0; j < 41; ++j)
      CHECK(scan.verdicts[i * 41 + j] == scan.verdicts[(40 - i) * 41 + (40 - j)]);
}
