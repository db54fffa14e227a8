#include "invariset/lift.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "invariset/errors.hpp"

namespace invariset {

namespace {

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void enumerate_grade(int n, int grade, std::vector<int>& partial,
                     std::vector<std::vector<int>>& out) {
  const int pos = static_cast<int>(partial.size());
  if (pos == n - 1) {
    partial.push_back(grade);
    out.push_back(partial);
    partial.pop_back();
    return;
  }
  // Decreasing first coordinate gives decreasing-lexicographic order.
  for (int a = grade; a >= 0; --a) {
    partial.push_back(a);
    enumerate_grade(n, grade - a, partial, out);
    partial.pop_back();
  }
}

using TermMap = std::map<std::vector<int>, double>;

TermMap linear_form(const Mat& A, int row) {
  const int n = static_cast<int>(A.cols());
  TermMap out;
  for (int t = 0; t < n; ++t)
    if (A(row, t) != 0.0) {
      std::vector<int> e(n, 0);
      e[t] = 1;
      out[e] = A(row, t);
    }
  return out;
}

TermMap term_mul(const TermMap& a, const TermMap& b, int n) {
  TermMap out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      std::vector<int> e(n);
      for (int i = 0; i < n; ++i) e[i] = ea[i] + eb[i];
      out[e] += ca * cb;
    }
  return out;
}

/// Canonical factor choice for a monomial of total degree t >= 2: the smaller
/// factor has grade max(1, t - dbar). Grade-1 factors take the first variable
/// present; balanced even splits halve each exponent and hand remainders to
/// odd coordinates in index order.
std::pair<std::vector<int>, std::vector<int>> split_monomial(
    const std::vector<int>& alpha, int total, int dbar) {
  const int n = static_cast<int>(alpha.size());
  const int bsize = std::max(1, total - dbar);
  std::vector<int> beta(n, 0);
  if (bsize == 1) {
    for (int j = 0; j < n; ++j)
      if (alpha[j] > 0) {
        beta[j] = 1;
        break;
      }
  } else if (2 * bsize == total) {
    int assigned = 0;
    for (int j = 0; j < n; ++j) {
      beta[j] = alpha[j] / 2;
      assigned += beta[j];
    }
    int remainder = bsize - assigned;
    for (int j = 0; j < n && remainder > 0; ++j)
      if (alpha[j] % 2 == 1) {
        ++beta[j];
        --remainder;
      }
  } else {
    int remaining = bsize;
    for (int j = 0; j < n && remaining > 0; ++j) {
      beta[j] = std::min(alpha[j], remaining);
      remaining -= beta[j];
    }
  }
  std::vector<int> gamma(n);
  for (int j = 0; j < n; ++j) gamma[j] = alpha[j] - beta[j];
  return {beta, gamma};
}

}  // namespace

MonomialBasis monomial_basis(int n, int d) {
  if (n < 1) throw ValidationError("dimension must be at least 1");
  if (d < 3)
    throw DegreeTooSmall("degree must be at least 3; lower degrees are quadratic already");
  MonomialBasis basis;
  basis.n = n;
  basis.d = d;
  basis.dbar = (d + 1) / 2;
  for (int grade = 1; grade <= basis.dbar; ++grade) {
    std::vector<std::vector<int>> grade_list;
    std::vector<int> partial;
    enumerate_grade(n, grade, partial, grade_list);
    if (n == 2 && grade == 2)
      grade_list = {{1, 1}, {2, 0}, {0, 2}};  // matches the 2-D quadratic layout
    if (static_cast<long long>(grade_list.size()) != binomial(n + grade - 1, grade))
      throw Error("monomial enumeration does not match the combinatorial count");
    for (auto& e : grade_list) {
      basis.index[e] = static_cast<int>(basis.exponents.size());
      basis.exponents.push_back(std::move(e));
    }
  }
  basis.N = static_cast<int>(basis.exponents.size());
  return basis;
}

Vec lift_vector(const Vec& x, const MonomialBasis& basis) {
  if (x.size() != basis.n) throw DimensionMismatch("lift input dimension mismatch");
  Vec z(basis.N);
  for (int r = 0; r < basis.N; ++r) {
    double v = 1.0;
    const auto& alpha = basis.exponents[r];
    for (int i = 0; i < basis.n; ++i)
      for (int a = 0; a < alpha[i]; ++a) v *= x(i);
    z(r) = v;
  }
  return z;
}

Mat lift_map(const Mat& A, const MonomialBasis& basis) {
  if (A.rows() != basis.n || A.cols() != basis.n)
    throw DimensionMismatch("lift map input must be n x n");
  Mat tilde = Mat::Zero(basis.N, basis.N);
  const int n = basis.n;
  for (int r = 0; r < basis.N; ++r) {
    const auto& beta = basis.exponents[r];
    // Expand prod_j (row_j(A) . x)^beta_j over same-grade monomials.
    TermMap poly = {{std::vector<int>(n, 0), 1.0}};
    for (int j = 0; j < n; ++j) {
      if (beta[j] == 0) continue;
      const TermMap row = linear_form(A, j);
      for (int rep = 0; rep < beta[j]; ++rep) poly = term_mul(poly, row, n);
    }
    for (const auto& [alpha, coeff] : poly) {
      if (coeff == 0.0) continue;
      auto it = basis.index.find(alpha);
      if (it == basis.index.end()) throw Error("lifted monomial fell outside the basis");
      tilde(r, it->second) = coeff;
    }
  }
  return tilde;
}

std::pair<SymMat, Vec> polynomial_to_quadratic(const PolynomialConstraint& poly,
                                               const MonomialBasis& basis) {
  if (poly.n != basis.n) throw DimensionMismatch("polynomial dimension mismatch");
  if (poly.degree() > 2 * basis.dbar)
    throw DegreeExceedsBasis("polynomial degree exceeds what the basis can encode");
  Mat p = Mat::Zero(basis.N, basis.N);
  Vec f = Vec::Zero(basis.n);
  for (const auto& term : poly.terms) {
    int total = 0;
    for (int a : term.alpha) total += a;
    if (total == 0) {
      if (term.coeff != 0.0)
        throw ValidationError("constant terms must be merged into the right-hand side");
      continue;
    }
    if (total == 1) {
      for (int j = 0; j < basis.n; ++j)
        if (term.alpha[j] == 1) f(j) += 0.5 * term.coeff;
      continue;
    }
    const auto [beta, gamma] = split_monomial(term.alpha, total, basis.dbar);
    const auto ib = basis.index.find(beta);
    const auto ig = basis.index.find(gamma);
    if (ib == basis.index.end() || ig == basis.index.end())
      throw DegreeExceedsBasis("monomial factor outside the basis");
    p(ib->second, ig->second) += 0.5 * term.coeff;
    p(ig->second, ib->second) += 0.5 * term.coeff;
  }
  return {SymMat(p), f};
}

LiftedProblem build_lifted_problem(const SystemModel& system,
                                   const std::vector<QuadraticConstraint>& quad,
                                   const std::vector<PolynomialConstraint>& polys,
                                   double dx) {
  if (system.modes.size() != 1)
    throw ValidationError("lifting is defined for a single mode");
  if (dx <= 0.0) throw MissingBallBound("lifting needs a positive dx");
  int degree = 3;
  for (const auto& poly : polys) degree = std::max(degree, poly.degree());

  LiftedProblem lp;
  lp.basis = monomial_basis(static_cast<int>(system.n), degree);
  lp.tilde = SystemModel({lift_map(system.modes.front(), lp.basis)});

  const int N = lp.basis.N;
  const Eigen::Index n = system.n;
  Mat embed = Mat::Zero(n, N);  // [I_n 0]
  embed.leftCols(n) = Mat::Identity(n, n);

  for (const auto& c : quad) {
    QuadraticConstraint zc;
    zc.Q = SymMat(embed.transpose() * c.Q.mat() * embed);
    zc.q = embed.transpose() * c.q;
    lp.xz.push_back(std::move(zc));
  }
  for (const auto& poly : polys) {
    auto [p, f] = polynomial_to_quadratic(poly, lp.basis);
    QuadraticConstraint zc;
    zc.Q = std::move(p);
    zc.q = embed.transpose() * f;
    lp.xz.push_back(std::move(zc));
  }

  lp.dz = 0.0;
  double power = 1.0;
  for (int grade = 1; grade <= lp.basis.dbar; ++grade) {
    power *= dx;
    lp.dz += power;
  }
  QuadraticConstraint ball;
  ball.Q = SymMat(Mat::Identity(N, N) / lp.dz);
  ball.q = Vec::Zero(N);
  lp.xz.push_back(std::move(ball));
  return lp;
}

}  // namespace invariset
