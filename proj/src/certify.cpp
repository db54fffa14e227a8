#include "invariset/certify.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "invariset/errors.hpp"

namespace invariset {

std::pair<double, Vec> lambda_max(const SymMat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m.mat());
  const Eigen::Index d = m.dim();
  return {es.eigenvalues()(d - 1), es.eigenvectors().col(d - 1)};
}

namespace {

void check_family(const HomForm& Q, std::span<const HomForm> S) {
  for (const HomForm& s : S)
    if (s.dim() != Q.dim())
      throw DimensionMismatch("family member dimension does not match target");
}

/// f(tau) = lambda_max(Q - sum tau_j S_j).
class EigObjective {
 public:
  EigObjective(const Mat& q, std::span<const HomForm> S)
      : q_(q), s_(S), scratch_(q.rows(), q.cols()) {}

  int evals = 0;

  double value(const Vec& tau) {
    assemble(tau);
    Eigen::SelfAdjointEigenSolver<Mat> es(scratch_, Eigen::EigenvaluesOnly);
    ++evals;
    return es.eigenvalues()(scratch_.rows() - 1);
  }

 private:
  void assemble(const Vec& tau) {
    scratch_ = q_;
    for (std::size_t j = 0; j < s_.size(); ++j)
      if (tau(j) != 0.0) scratch_.noalias() -= tau(j) * s_[j].mat.mat();
  }

  const Mat& q_;
  std::span<const HomForm> s_;
  Mat scratch_;
};

/// Log-barrier path following for
///   min r  s.t.  Z(tau, r) = sum_j tau_j S_j + r I - T  >= 0,  tau >= 0.
/// The problem is the epigraph form of min_tau lambda_max(T - sum tau_j S_j),
/// which is what certification needs. Small and dense, so damped Newton on the
/// barrier is both fast and accurate here.
class BarrierSolver {
 public:
  BarrierSolver(const Mat& target, std::span<const HomForm> S, int newton_budget)
      : t_(target), s_(S), d_(target.rows()), m_(static_cast<int>(S.size())),
        newton_budget_(newton_budget) {}

  int newton_steps = 0;

  struct Point {
    Vec tau;
    double r = 0.0;
  };

  /// Runs the path; invokes `stage_end` with the current tau after every
  /// centering stage (return true to stop early).
  Point solve(double gap_tol, const std::function<bool(const Vec&)>& stage_end) {
    Point p;
    p.tau = Vec::Constant(m_, 1.0);
    Mat z = assemble_z(p.tau, 0.0);
    Eigen::SelfAdjointEigenSolver<Mat> es(z, Eigen::EigenvaluesOnly);
    p.r = -es.eigenvalues()(0) + 1.0;  // Z = z + rI strictly positive definite

    const double nu = static_cast<double>(d_ + m_);
    double t = 1.0;
    while (newton_steps < newton_budget_) {
      center(p, t);
      if (stage_end && stage_end(p.tau)) return p;
      if (nu / t <= gap_tol) break;
      t *= 10.0;
    }
    return p;
  }

 private:
  Mat assemble_z(const Vec& tau, double r) const {
    Mat z = -t_;
    for (int j = 0; j < m_; ++j) z.noalias() += tau(j) * s_[j].mat.mat();
    z.diagonal().array() += r;
    return z;
  }

  double barrier(const Point& p, double t, bool& feasible) const {
    feasible = false;
    if ((p.tau.array() <= 0.0).any()) return 0.0;
    const Mat z = assemble_z(p.tau, p.r);
    Eigen::LLT<Mat> llt(z);
    if (llt.info() != Eigen::Success) return 0.0;
    double logdet = 0.0;
    for (int i = 0; i < d_; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    feasible = true;
    return t * p.r - logdet - p.tau.array().log().sum();
  }

  void center(Point& p, double t) {
    const int n_var = m_ + 1;
    Vec grad(n_var), delta(n_var);
    Mat gram_rows(n_var, d_ * d_);
    while (newton_steps < newton_budget_) {
      ++newton_steps;
      const Mat z = assemble_z(p.tau, p.r);
      Eigen::LLT<Mat> llt(z);
      if (llt.info() != Eigen::Success) return;  // numerically at the boundary
      const Mat lower = llt.matrixL();

      // Y_j = L^-1 S_j L^-T; gradient and Hessian of -logdet come from traces
      // of Y products, so the Hessian is a Gram matrix and stays PSD.
      for (int j = 0; j <= m_; ++j) {
        Mat y;
        if (j < m_) {
          Mat tmp = lower.triangularView<Eigen::Lower>().solve(s_[j].mat.mat());
          y = lower.triangularView<Eigen::Lower>().solve(tmp.transpose());
        } else {
          Mat tmp = lower.triangularView<Eigen::Lower>().solve(Mat::Identity(d_, d_));
          y = lower.triangularView<Eigen::Lower>().solve(tmp.transpose());
        }
        gram_rows.row(j) = Eigen::Map<const Vec>(y.data(), d_ * d_).transpose();
        grad(j) = -y.trace();
      }
      for (int j = 0; j < m_; ++j) grad(j) -= 1.0 / p.tau(j);
      grad(m_) += t;

      Mat hess = gram_rows * gram_rows.transpose();
      for (int j = 0; j < m_; ++j) hess(j, j) += 1.0 / (p.tau(j) * p.tau(j));
      hess.diagonal().array() += 1e-14 * (1.0 + hess.diagonal().maxCoeff());

      Eigen::LDLT<Mat> ldlt(hess);
      if (ldlt.info() != Eigen::Success) return;
      delta = ldlt.solve(-grad);

      const double decrement2 = -grad.dot(delta);
      if (!(decrement2 > 1e-11)) return;  // centered (or numerically stuck)

      // Fraction-to-boundary for tau > 0, then backtrack to keep Z PSD and
      // achieve Armijo decrease.
      double alpha = 1.0;
      for (int j = 0; j < m_; ++j)
        if (delta(j) < 0.0) alpha = std::min(alpha, -0.99 * p.tau(j) / delta(j));
      bool feasible = false;
      const double base = barrier(p, t, feasible);
      if (!feasible) return;
      Point trial;
      for (int back = 0; back < 60; ++back) {
        trial.tau = p.tau + alpha * delta.head(m_);
        trial.r = p.r + alpha * delta(m_);
        bool ok = false;
        const double value = barrier(trial, t, ok);
        if (ok && value <= base - 0.25 * alpha * decrement2) break;
        alpha *= 0.5;
        if (back == 59) return;  // no acceptable step
      }
      p = trial;
    }
  }

  const Mat& t_;
  std::span<const HomForm> s_;
  int d_;
  int m_;
  int newton_budget_;
};

}  // namespace

double evaluate_r(const HomForm& Q, std::span<const HomForm> S, const Vec& tau) {
  check_family(Q, S);
  if (tau.size() != static_cast<Eigen::Index>(S.size()))
    throw DimensionMismatch("weight vector length does not match family size");
  EigObjective obj(Q.mat.mat(), S);
  return obj.value(tau);
}

Certificate solve_certificate(const HomForm& Q, std::span<const HomForm> S,
                              const SolverOptions& opts, const Vec* warm_start) {
  if (S.empty()) throw ValidationError("certificate family must be nonempty");
  check_family(Q, S);
  const int m = static_cast<int>(S.size());
  const double scale = 1.0 + Q.mat.frobenius();
  const double thresh = opts.eps_cert * scale;

  EigObjective obj(Q.mat.mat(), S);
  Vec best_tau = Vec::Zero(m);
  double best_f = obj.value(best_tau);

  auto consider = [&](const Vec& tau) {
    const double f = obj.value(tau);
    if (f < best_f) {
      best_f = f;
      best_tau = tau;
    }
    return f;
  };
  auto make_cert = [&](int iterations) {
    Certificate c;
    c.status = best_f <= thresh ? CertStatus::Certified : CertStatus::NotCertified;
    c.value = best_f;
    c.weights = best_tau;
    c.iterations = iterations;
    return c;
  };

  // Coordinate candidates catch self-domination and scaled copies exactly,
  // including boundary cases where the optimum is exactly zero.
  for (int j = 0; j < m; ++j) {
    Vec tau = Vec::Zero(m);
    tau(j) = 1.0;
    consider(tau);
    if (opts.stop_at_certified && best_f <= thresh) return make_cert(obj.evals);
  }
  if (warm_start && warm_start->size() == m) {
    consider(warm_start->cwiseMax(0.0));
    if (opts.stop_at_certified && best_f <= thresh) return make_cert(obj.evals);
  }

  const int newton_budget = std::max(50, opts.max_iters);
  BarrierSolver barrier(Q.mat.mat(), S, newton_budget);
  const double gap_tol =
      std::min(1e-10 * scale, 0.5 * std::max(thresh, 1e-300));
  barrier.solve(gap_tol, [&](const Vec& tau) {
    consider(tau);
    return opts.stop_at_certified && best_f <= thresh;
  });
  return make_cert(obj.evals + barrier.newton_steps);
}

PruneResult prune_family(std::span<const HomForm> S, const SolverOptions& opts) {
  PruneResult result;
  if (S.empty()) return result;
  std::vector<char> kept(S.size(), 1);
  SolverOptions reduced = opts;
  reduced.max_iters = std::max(100, opts.max_iters / 4);
  for (std::size_t i = 0; i < S.size(); ++i) {
    std::vector<HomForm> rest;
    rest.reserve(S.size() - 1);
    for (std::size_t j = 0; j < S.size(); ++j)
      if (j != i && kept[j]) rest.push_back(S[j]);
    if (rest.empty()) continue;
    Certificate cert = solve_certificate(S[i], rest, reduced);
    if (cert.certified()) {
      kept[i] = 0;
      result.removed.emplace_back(static_cast<int>(i), std::move(cert));
    }
  }
  for (std::size_t i = 0; i < S.size(); ++i)
    if (kept[i]) result.retained.push_back(static_cast<int>(i));
  return result;
}

}  // namespace invariset
