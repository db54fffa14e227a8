#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "invariset/errors.hpp"

namespace invariset {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Dense real symmetric matrix. Construction checks near-symmetry and stores
/// the symmetrized part, so downstream eigen-solves can rely on exact symmetry.
class SymMat {
 public:
  SymMat() = default;
  explicit SymMat(const Mat& m, double rel_tol = 1e-12);

  Eigen::Index dim() const { return m_.rows(); }
  const Mat& mat() const { return m_; }
  double frobenius() const { return m_.norm(); }

 private:
  Mat m_;
};

/// Quadratic constraint x'Qx + 2q'x <= 1.
struct QuadraticConstraint {
  SymMat Q;
  Vec q;

  Eigen::Index dim() const { return q.size(); }
  /// Left-hand side value x'Qx + 2q'x.
  double eval(const Vec& x) const;
};

/// Homogeneous form in (x,1): membership means (x,1)' mat (x,1) <= 0.
struct HomForm {
  SymMat mat;

  Eigen::Index dim() const { return mat.dim(); }
  double eval(const Vec& x) const;
};

/// Scalar constraint H(x) <= 1 where H admits the quadratic envelope
///   |H(x) - H(0) - grad0'x| <= (lipschitz/2) ||x||^2   on the constraint set.
struct QuasiSmoothConstraint {
  std::function<double(const Vec&)> h;
  std::string expr;  // textual form when expression-backed, else empty
  double h0 = 0.0;   // H(0)
  Vec grad0;
  double lipschitz = 0.0;

  Eigen::Index dim() const { return grad0.size(); }
  double eval(const Vec& x) const { return h(x); }
};

/// One term of a polynomial: coeff * prod_i x_i^alpha[i].
struct PolynomialTerm {
  std::vector<int> alpha;
  double coeff = 0.0;
};

/// Polynomial constraint H(x) <= 1, H given as an expanded term list with no
/// constant term (constants are merged into the right-hand side upstream).
struct PolynomialConstraint {
  std::vector<PolynomialTerm> terms;
  int n = 0;
  std::string expr;  // normalized textual form when available

  int degree() const;
  double eval(const Vec& x) const;
};

/// Autonomous linear dynamics; one mode is an LTI system, several modes mean
/// arbitrary switching among them.
struct SystemModel {
  std::vector<Mat> modes;
  Eigen::Index n = 0;

  SystemModel() = default;
  explicit SystemModel(std::vector<Mat> mode_list);
  Eigen::Index num_modes() const { return static_cast<Eigen::Index>(modes.size()); }
};

/// Vector-valued map R^n -> R^n, optionally expression-backed per component.
struct VectorMap {
  std::function<Vec(const Vec&)> f;
  std::vector<std::string> exprs;  // component expressions when available

  Vec operator()(const Vec& x) const { return f(x); }
};

/// Change of coordinates y = forward(x), x = inverse(y), with forward(0) = 0.
struct Transform {
  VectorMap forward;
  VectorMap inverse;
};

/// Nonlinear system x+ = inverse(A * forward(x)) obtained by linearizing
/// through a diffeomorphism.
struct TransformedSystem {
  SystemModel inner;  // dynamics of y = forward(x)
  Transform map;
};

/// Full problem statement in the working coordinates (y when a transform is
/// present, x otherwise). All constraints use right-hand side 1.
struct ProblemSpec {
  SystemModel system;
  std::optional<Transform> transform;
  std::vector<QuadraticConstraint> quad;
  std::vector<QuasiSmoothConstraint> quasi;
  std::vector<PolynomialConstraint> poly;
  std::optional<double> dx;  // ball radius bound: ||x||^2 <= dx on the quad set

  TransformedSystem transformed_system() const;
};

struct SolverOptions {
  double eps_cert = 1e-9;  // scale-relative certification tolerance
  int max_iters = 2000;    // objective evaluations per certificate solve
  std::uint64_t seed = 0;  // deterministic restarts
  bool stop_at_certified = true;  // early exit once below tolerance
};

struct RunOptions {
  SolverOptions solver;
  int k_max = 200;
  int prune_every = 0;  // 0 = auto: every iteration when switched, else every 3
};

}  // namespace invariset
