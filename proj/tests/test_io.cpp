#include "invariset/io.hpp"

#include <random>

#include "doctest.h"
#include "invariset/errors.hpp"

using namespace invariset;

namespace {

Vec v2(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

const char* kCircleProblem = R"({
  "system": {"modes": [[[1.0216, 0.3234], [-0.6597, 0.5226]]]},
  "quadratic": [{"Q": [[1, 0], [0, 1]]}],
  "options": {"k_max": 50, "seed": 3}
})";

}  // namespace

TEST_CASE("problem parsing and normalization") {
  auto [spec, opts] = io::parse_problem(kCircleProblem);
  CHECK(spec.system.n == 2);
  CHECK(spec.quad.size() == 1);
  CHECK(opts.k_max == 50);
  CHECK(opts.solver.seed == 3);

  // rhs normalization divides through.
  auto [spec2, opts2] = io::parse_problem(R"({
    "system": {"modes": [[[0.5, 0], [0, 0.5]]]},
    "quadratic": [{"Q": [[2, 0], [0, 2]], "q": [1, 0], "rhs": 2}]
  })");
  CHECK(spec2.quad[0].Q.mat()(0, 0) == doctest::Approx(1.0));
  CHECK(spec2.quad[0].q(0) == doctest::Approx(0.5));

  // Degree-2 polynomials fold into the quadratic list.
  auto [spec3, opts3] = io::parse_problem(R"({
    "system": {"modes": [[[0.5, 0], [0, 0.5]]]},
    "quadratic": [{"Q": [[1, 0], [0, 1]]}],
    "polynomial": [{"expr": "x1^2 + 0.5*x1*x2 - x2 + 0.25", "rhs": 1.25}]
  })");
  CHECK(spec3.poly.empty());
  REQUIRE(spec3.quad.size() == 2);
  CHECK(spec3.quad[1].Q.mat()(0, 0) == doctest::Approx(1.0));
  CHECK(spec3.quad[1].Q.mat()(0, 1) == doctest::Approx(0.25));
  CHECK(spec3.quad[1].q(1) == doctest::Approx(-0.5));

  CHECK_THROWS_AS(io::parse_problem("not json"), ValidationError);
  CHECK_THROWS_AS(io::parse_problem(R"({"system": {}})"), ValidationError);
  // Constant absorbs the whole right-hand side: origin excluded.
  CHECK_THROWS_AS(io::parse_problem(R"({
    "system": {"modes": [[[0.5]]]},
    "polynomial": [{"expr": "x1^3 + 2", "rhs": 1}]
  })"),
                  ValidationError);
}

TEST_CASE("description round trip preserves membership") {
  auto [spec, opts] = io::parse_problem(kCircleProblem);
  RunResult result = compute(spec, opts);
  const std::string text = io::result_to_json(result);
  InvariantSetDescription reloaded = io::description_from_json(text);

  CHECK(reloaded.k_star == result.desc.k_star);
  CHECK(reloaded.hom_forms.size() == result.desc.hom_forms.size());

  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int i = 0; i < 500; ++i) {
    const Vec x = v2(u(rng), u(rng));
    CHECK(membership(reloaded, x) == membership(result.desc, x));
  }
}

TEST_CASE("quasi-smooth description round trip") {
  auto [spec, opts] = io::parse_problem(R"({
    "system": {"modes": [[[1.0216, 0.3234], [-0.6597, 0.5226]]]},
    "quadratic": [{"Q": [[1, 0], [0, 1]]}],
    "quasismooth": [
      {"expr": "sqrt(x1^2+x2^2+1)+2*x1+2*x2-2", "h0": -1, "grad0": [2, 2], "L": 1}
    ]
  })");
  RunResult result = compute(spec, opts);
  InvariantSetDescription reloaded =
      io::description_from_json(io::result_to_json(result));
  CHECK(reloaded.quasi.size() == 1);
  CHECK(reloaded.quasi_words.size() == result.desc.quasi_words.size());
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const Vec x = v2(u(rng), u(rng));
    CHECK(membership(reloaded, x) == membership(result.desc, x));
  }
}

TEST_CASE("scan CSV format") {
  auto [spec, opts] = io::parse_problem(kCircleProblem);
  RunResult result = compute(spec, opts);

  auto scan = oracle::grid_membership_scan(result.desc, {{0.0, 0.0}, {0.0, 0.0}}, 3);
  const std::string csv = io::scan_to_csv(scan);
  CHECK(csv.substr(0, 13) == "x1,x2,member\n");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);  // header + 9 rows
  CHECK(csv.find("\r") == std::string::npos);

  // Deterministic output.
  auto scan2 = oracle::grid_membership_scan(result.desc, {{0.0, 0.0}, {0.0, 0.0}}, 3);
  CHECK(io::scan_to_csv(scan2) == csv);
}
