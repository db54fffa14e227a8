#include "invariset/model.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "invariset/oracle.hpp"

namespace invariset {

SymMat::SymMat(const Mat& m, double rel_tol) {
  if (m.rows() != m.cols())
    throw DimensionMismatch("symmetric matrix must be square");
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > rel_tol * scale)
    throw ValidationError("matrix is not symmetric within tolerance");
  m_ = 0.5 * (m + m.transpose());
}

double QuadraticConstraint::eval(const Vec& x) const {
  return x.dot(Q.mat() * x) + 2.0 * q.dot(x);
}

double HomForm::eval(const Vec& x) const {
  const Eigen::Index n = mat.dim() - 1;
  if (x.size() != n) throw DimensionMismatch("point dimension does not match form");
  const Mat& m = mat.mat();
  return x.dot(m.topLeftCorner(n, n) * x) + 2.0 * m.topRightCorner(n, 1).col(0).dot(x) +
         m(n, n);
}

int PolynomialConstraint::degree() const {
  int d = 0;
  for (const auto& t : terms) {
    int total = 0;
    for (int a : t.alpha) total += a;
    d = std::max(d, total);
  }
  return d;
}

double PolynomialConstraint::eval(const Vec& x) const {
  double value = 0.0;
  for (const auto& t : terms) {
    double m = t.coeff;
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < t.alpha[i]; ++a) m *= x(i);
    value += m;
  }
  return value;
}

SystemModel::SystemModel(std::vector<Mat> mode_list) : modes(std::move(mode_list)) {
  if (modes.empty()) throw ValidationError("system needs at least one mode");
  n = modes.front().rows();
  for (const Mat& m : modes)
    if (m.rows() != n || m.cols() != n)
      throw DimensionMismatch("all modes must be square with identical dimension");
}

TransformedSystem ProblemSpec::transformed_system() const {
  if (!transform) throw Error("problem has no transform");
  return TransformedSystem{system, *transform};
}

HomForm homogenize_quadratic(const QuadraticConstraint& c) {
  if (c.Q.dim() != c.q.size())
    throw DimensionMismatch("Q and q dimensions differ");
  const Eigen::Index n = c.q.size();
  Mat b = Mat::Zero(n + 1, n + 1);
  b.topLeftCorner(n, n) = c.Q.mat();
  b.topRightCorner(n, 1) = c.q;
  b.bottomLeftCorner(1, n) = c.q.transpose();
  b(n, n) = -1.0;
  return HomForm{SymMat(b)};
}

namespace {

HomForm homogenize_envelope(const QuasiSmoothConstraint& c, double curvature_sign) {
  const Eigen::Index n = c.grad0.size();
  Mat b = Mat::Zero(n + 1, n + 1);
  b.topLeftCorner(n, n) =
      curvature_sign * 0.5 * c.lipschitz * Mat::Identity(n, n);
  b.topRightCorner(n, 1) = 0.5 * c.grad0;
  b.bottomLeftCorner(1, n) = 0.5 * c.grad0.transpose();
  b(n, n) = c.h0 - 1.0;
  return HomForm{SymMat(b)};
}

}  // namespace

HomForm homogenize_upper(const QuasiSmoothConstraint& c) {
  return homogenize_envelope(c, +1.0);
}

HomForm homogenize_lower(const QuasiSmoothConstraint& c) {
  return homogenize_envelope(c, -1.0);
}

Mat augment_mode(const Mat& A) {
  if (A.rows() != A.cols()) throw DimensionMismatch("mode matrix must be square");
  const Eigen::Index n = A.rows();
  Mat b = Mat::Zero(n + 1, n + 1);
  b.topLeftCorner(n, n) = A;
  b(n, n) = 1.0;
  return b;
}

std::vector<QuadraticConstraint> ensure_ball(std::vector<QuadraticConstraint> quad,
                                             std::optional<double> dx) {
  for (const auto& c : quad) {
    Eigen::SelfAdjointEigenSolver<Mat> es(c.Q.mat(), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() > 1e-10) return quad;
  }
  if (!dx)
    throw MissingBallBound(
        "no positive definite constraint present; a ball radius bound dx is required");
  if (*dx <= 0.0) throw ValidationError("dx must be positive");
  const Eigen::Index n = quad.empty() ? 0 : quad.front().dim();
  if (n == 0) throw ValidationError("cannot infer dimension for the ball constraint");
  QuadraticConstraint ball;
  ball.Q = SymMat(Mat::Identity(n, n) / *dx);
  ball.q = Vec::Zero(n);
  quad.insert(quad.begin(), ball);
  return quad;
}

double spectral_radius(const Mat& A) {
  Eigen::EigenSolver<Mat> es(A, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

StabilityReport validate_system(const SystemModel& s) {
  if (s.modes.empty()) throw ValidationError("system needs at least one mode");
  StabilityReport report;
  if (s.modes.size() == 1) {
    report.single_mode = true;
    report.spectral_radius = spectral_radius(s.modes.front());
    if (report.spectral_radius >= 1.0 - 1e-9)
      throw Unstable("spectral radius " + std::to_string(report.spectral_radius) +
                     " is not strictly below 1");
  } else {
    report.single_mode = false;
    report.jsr_bound = oracle::jsr_upper_bound(s.modes, 8);
    if (report.jsr_bound >= 1.0)
      report.warnings.push_back(
          "joint spectral radius upper bound " + std::to_string(report.jsr_bound) +
          " is not below 1; stability under arbitrary switching is unverified");
  }
  return report;
}

QuadraticConstraint normalize_quadratic(const SymMat& Q, const Vec& q, double rhs) {
  if (rhs <= 0.0)
    throw ValidationError("constraint right-hand side must be positive after "
                          "moving constants; the origin would be excluded");
  QuadraticConstraint c;
  c.Q = SymMat(Q.mat() / rhs);
  c.q = q / rhs;
  return c;
}

double bounding_radius(const std::vector<QuadraticConstraint>& quad,
                       std::optional<double> dx) {
  double best = dx ? std::sqrt(*dx) : std::numeric_limits<double>::infinity();
  for (const auto& c : quad) {
    Eigen::SelfAdjointEigenSolver<Mat> es(c.Q.mat(), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin > 1e-10) {
      const double qn = c.q.norm();
      best = std::min(best, (qn + std::sqrt(qn * qn + lmin)) / lmin);
    }
  }
  if (!std::isfinite(best))
    throw MissingBallBound("cannot bound the constraint set: provide dx");
  return best;
}

namespace {

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

bool inside_quad_set(const std::vector<QuadraticConstraint>& quad, const Vec& x) {
  for (const auto& c : quad)
    if (c.eval(x) > 1.0) return false;
  return true;
}

}  // namespace

std::vector<Vec> validation_samples(const std::vector<QuadraticConstraint>& quad,
                                    std::optional<double> dx, int count) {
  if (quad.empty()) return {};
  const Eigen::Index n = quad.front().dim();
  if (n < 1) return {};
  if (n > static_cast<Eigen::Index>(std::size(kPrimes)))
    return {};  // envelope spot checks limited to moderate dimensions
  // Prefer a radius derived from the constraints themselves, so a too-small dx
  // is actually exposed by the samples rather than shrinking them.
  double radius;
  try {
    radius = bounding_radius(quad, std::nullopt);
  } catch (const MissingBallBound&) {
    radius = bounding_radius(quad, dx);
  }
  std::vector<Vec> samples;
  samples.reserve(count);
  int index = 1;
  const int budget = count * 64;
  while (static_cast<int>(samples.size()) < count && index <= budget) {
    Vec x(n);
    for (Eigen::Index i = 0; i < n; ++i)
      x(i) = radius * (2.0 * halton(index, kPrimes[i]) - 1.0);
    ++index;
    if (x.norm() <= radius && inside_quad_set(quad, x)) samples.push_back(std::move(x));
  }
  return samples;
}

void validate_problem(const ProblemSpec& spec) {
  const Eigen::Index n = spec.system.n;
  if (spec.system.modes.empty()) throw ValidationError("system has no modes");
  for (const Mat& m : spec.system.modes) {
    if (m.rows() != n || m.cols() != n)
      throw DimensionMismatch("mode dimensions are inconsistent");
    if (!m.allFinite()) throw ValidationError("mode matrix has non-finite entries");
  }
  if (spec.quad.empty() && spec.quasi.empty() && spec.poly.empty())
    throw ValidationError("at least one constraint is required");
  for (const auto& c : spec.quad) {
    if (c.dim() != n) throw DimensionMismatch("quadratic constraint dimension mismatch");
    if (!c.Q.mat().allFinite() || !c.q.allFinite())
      throw ValidationError("quadratic constraint has non-finite entries");
  }
  for (const auto& c : spec.quasi) {
    if (c.dim() != n) throw DimensionMismatch("quasi-smooth constraint dimension mismatch");
    if (!c.grad0.allFinite() || !std::isfinite(c.h0) || !std::isfinite(c.lipschitz))
      throw ValidationError("quasi-smooth constraint has non-finite data");
  }
  for (const auto& c : spec.poly) {
    if (c.n != n) throw DimensionMismatch("polynomial constraint dimension mismatch");
    for (const auto& t : c.terms)
      if (!std::isfinite(t.coeff))
        throw ValidationError("polynomial constraint has non-finite coefficients");
  }

  // Compactness: a positive definite member or an explicit dx.
  bool has_pd = false;
  for (const auto& c : spec.quad) {
    Eigen::SelfAdjointEigenSolver<Mat> es(c.Q.mat(), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() > 1e-10) has_pd = true;
  }
  if (!has_pd && !spec.dx)
    throw MissingBallBound("no positive definite constraint and no dx given");

  std::vector<QuadraticConstraint> sampling_set = spec.quad;
  if (sampling_set.empty() && spec.dx) {
    QuadraticConstraint ball;
    ball.Q = SymMat(Mat::Identity(n, n) / *spec.dx);
    ball.q = Vec::Zero(n);
    sampling_set.push_back(std::move(ball));
  }
  const auto samples = validation_samples(sampling_set, spec.dx);

  if (spec.dx) {
    if (*spec.dx <= 0.0) throw ValidationError("dx must be positive");
    for (const Vec& x : samples)
      if (x.squaredNorm() > *spec.dx * (1.0 + 1e-9))
        throw ValidationError("dx is too small: a constraint-set sample violates ||x||^2 <= dx");
  }

  for (const auto& c : spec.quasi) {
    if (c.lipschitz < 0.0) throw ValidationError("quasi-smooth constant L must be >= 0");
    if (c.h0 >= 1.0)
      throw ValidationError("quasi-smooth constraint excludes the origin (H(0) >= 1)");
    const double at0 = c.h(Vec::Zero(n));
    if (std::abs(at0 - c.h0) > 1e-10)
      throw ValidationError("quasi-smooth anchor H(0) does not match the evaluator");
    for (const Vec& x : samples) {
      const double dev = std::abs(c.h(x) - c.h0 - c.grad0.dot(x));
      if (dev > 0.5 * c.lipschitz * x.squaredNorm() + 1e-9)
        throw ValidationError("quasi-smooth envelope violated at a validation sample");
    }
  }

  if (spec.transform) {
    const Vec zero = Vec::Zero(n);
    if (spec.transform->forward(zero).norm() > 1e-12)
      throw ValidationError("transform must fix the origin");
    for (const Vec& y : samples) {
      // Samples live in the working coordinates; check the inverse round-trip.
      const Vec x = spec.transform->inverse(y);
      if ((spec.transform->forward(x) - y).norm() > 1e-8)
        throw ValidationError("transform round-trip failed at a validation sample");
    }
  }
}

}  // namespace invariset
