#include "invariset/iterate.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "invariset/model.hpp"

namespace invariset {

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Key with entries rounded at 1e-10; pullbacks of identical forms collide on
/// purpose so identity-like modes do not inflate the families.
std::string form_key(const SymMat& m) {
  const Mat& a = m.mat();
  std::string key;
  key.reserve(static_cast<std::size_t>(a.size()) * sizeof(long long));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double v = std::clamp(a(i, j), -1e8, 1e8);
      const long long r = std::llround(v * 1e10);
      key.append(reinterpret_cast<const char*>(&r), sizeof(r));
    }
  return key;
}

HomForm pullback(const HomForm& f, const Mat& aug_mode) {
  return HomForm{SymMat(aug_mode.transpose() * f.mat.mat() * aug_mode, 1e-9)};
}

Word prepend(int mode, const Word& w) {
  Word out;
  out.reserve(w.size() + 1);
  out.push_back(mode);
  out.insert(out.end(), w.begin(), w.end());
  return out;
}

struct Proposal {
  std::vector<FamilyEntry> new_quad;
  std::vector<FamilyEntry> new_upper;
  std::vector<FamilyEntry> new_lower;
};

Proposal propose(const FamilyState& st, const std::vector<Mat>& aug) {
  Proposal p;
  const int num_modes = static_cast<int>(aug.size());

  std::unordered_set<std::string> quad_keys;
  for (std::size_t i = 0; i < st.quad_family.size(); ++i)
    if (st.quad_alive[i]) quad_keys.insert(form_key(st.quad_family[i].form.mat));
  for (int idx : st.quad_frontier) {
    if (!st.quad_alive[idx]) continue;
    const FamilyEntry& parent = st.quad_family[idx];
    for (int m = 0; m < num_modes; ++m) {
      FamilyEntry e;
      e.form = pullback(parent.form, aug[m]);
      if (!quad_keys.insert(form_key(e.form.mat)).second) continue;
      e.word = prepend(m, parent.word);
      e.constraint_index = parent.constraint_index;
      e.source = FormSource::Quadratic;
      p.new_quad.push_back(std::move(e));
    }
  }

  std::unordered_set<std::string> upper_keys;
  for (const FamilyEntry& parent : st.h_upper)
    for (int m = 0; m < num_modes; ++m) {
      FamilyEntry e;
      e.form = pullback(parent.form, aug[m]);
      if (!upper_keys.insert(form_key(e.form.mat)).second) continue;
      e.word = prepend(m, parent.word);
      e.constraint_index = parent.constraint_index;
      e.source = FormSource::QuasiUpper;
      p.new_upper.push_back(std::move(e));
    }

  std::unordered_set<std::string> lower_keys;
  for (std::size_t i = 0; i < st.h_lower_family.size(); ++i)
    if (st.h_lower_alive[i]) lower_keys.insert(form_key(st.h_lower_family[i].form.mat));
  for (int idx : st.h_lower_frontier) {
    if (!st.h_lower_alive[idx]) continue;
    const FamilyEntry& parent = st.h_lower_family[idx];
    for (int m = 0; m < num_modes; ++m) {
      FamilyEntry e;
      e.form = pullback(parent.form, aug[m]);
      if (!lower_keys.insert(form_key(e.form.mat)).second) continue;
      e.word = prepend(m, parent.word);
      e.constraint_index = parent.constraint_index;
      e.source = FormSource::QuasiLower;
      p.new_lower.push_back(std::move(e));
    }
  }
  return p;
}

void commit(FamilyState& st, Proposal&& p) {
  st.quad_frontier.clear();
  for (auto& e : p.new_quad) {
    st.quad_family.push_back(std::move(e));
    st.quad_alive.push_back(1);
    st.quad_frontier.push_back(static_cast<int>(st.quad_family.size()) - 1);
  }
  st.h_lower_frontier.clear();
  for (auto& e : p.new_lower) {
    st.h_lower_family.push_back(std::move(e));
    st.h_lower_alive.push_back(1);
    st.h_lower_frontier.push_back(static_cast<int>(st.h_lower_family.size()) - 1);
  }
  st.h_upper = std::move(p.new_upper);
  st.k += 1;
}

int threads_from_env() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("INVARISET_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<int>(std::min<long>(v, 64));
  }
  return hw;
}

template <typename Body>
void parallel_for(int count, int max_threads, Body&& body) {
  const int threads = std::min(max_threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      try {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<Word> all_words_up_to(int num_modes, int k_max, std::size_t cap) {
  std::vector<Word> words = {Word{}};
  std::vector<Word> level = {Word{}};
  for (int len = 1; len <= k_max; ++len) {
    std::vector<Word> next_level;
    next_level.reserve(level.size() * num_modes);
    for (const Word& w : level)
      for (int m = 0; m < num_modes; ++m) {
        Word e = w;
        e.push_back(m);
        next_level.push_back(std::move(e));
      }
    for (const Word& w : next_level) {
      words.push_back(w);
      if (words.size() > cap)
        throw Error("word list for exact nonlinear membership is too large");
    }
    level = std::move(next_level);
  }
  return words;
}

}  // namespace

Mat word_product(const SystemModel& s, const Word& w) {
  Mat p = Mat::Identity(s.n, s.n);
  for (int idx : w) {
    if (idx < 0 || idx >= static_cast<int>(s.modes.size()))
      throw DimensionMismatch("mode index outside the mode set");
    p = s.modes[idx] * p;
  }
  return p;
}

std::vector<const FamilyEntry*> FamilyState::alive_quad() const {
  std::vector<const FamilyEntry*> out;
  for (std::size_t i = 0; i < quad_family.size(); ++i)
    if (quad_alive[i]) out.push_back(&quad_family[i]);
  return out;
}

std::vector<const FamilyEntry*> FamilyState::alive_lower() const {
  std::vector<const FamilyEntry*> out;
  for (std::size_t i = 0; i < h_lower_family.size(); ++i)
    if (h_lower_alive[i]) out.push_back(&h_lower_family[i]);
  return out;
}

FamilyState init_family(const std::vector<QuadraticConstraint>& quad,
                        const std::vector<QuasiSmoothConstraint>& quasi) {
  FamilyState st;
  std::unordered_set<std::string> keys;
  for (std::size_t i = 0; i < quad.size(); ++i) {
    FamilyEntry e;
    e.form = homogenize_quadratic(quad[i]);
    if (!keys.insert(form_key(e.form.mat)).second) continue;
    e.constraint_index = static_cast<int>(i);
    e.source = FormSource::Quadratic;
    st.quad_family.push_back(std::move(e));
    st.quad_alive.push_back(1);
    st.quad_frontier.push_back(static_cast<int>(st.quad_family.size()) - 1);
  }
  std::unordered_set<std::string> lower_keys;
  for (std::size_t i = 0; i < quasi.size(); ++i) {
    FamilyEntry up;
    up.form = homogenize_upper(quasi[i]);
    up.constraint_index = static_cast<int>(i);
    up.source = FormSource::QuasiUpper;
    st.h_upper.push_back(std::move(up));

    FamilyEntry lo;
    lo.form = homogenize_lower(quasi[i]);
    if (!lower_keys.insert(form_key(lo.form.mat)).second) continue;
    lo.constraint_index = static_cast<int>(i);
    lo.source = FormSource::QuasiLower;
    st.h_lower_family.push_back(std::move(lo));
    st.h_lower_alive.push_back(1);
    st.h_lower_frontier.push_back(static_cast<int>(st.h_lower_family.size()) - 1);
  }
  return st;
}

void step_quadratic(FamilyState& state, const SystemModel& modes) {
  std::vector<Mat> aug;
  aug.reserve(modes.modes.size());
  for (const Mat& m : modes.modes) aug.push_back(augment_mode(m));
  Proposal p = propose(state, aug);
  p.new_upper.clear();
  p.new_lower.clear();
  std::vector<FamilyEntry> keep_upper = state.h_upper;
  commit(state, std::move(p));
  state.h_upper = std::move(keep_upper);
}

void step_quasismooth(FamilyState& state, const SystemModel& modes) {
  std::vector<Mat> aug;
  aug.reserve(modes.modes.size());
  for (const Mat& m : modes.modes) aug.push_back(augment_mode(m));
  commit(state, propose(state, aug));
}

namespace {

struct CoreEngine {
  const ProblemSpec& spec;
  const RunOptions& opts;
  RunResult result;
  std::vector<Mat> aug;
  int threads;

  explicit CoreEngine(const ProblemSpec& s, const RunOptions& o)
      : spec(s), opts(o), threads(threads_from_env()) {
    for (const Mat& m : spec.system.modes) aug.push_back(augment_mode(m));
  }

  int archive(const HomForm& f) {
    result.archive.push_back(f.mat);
    return static_cast<int>(result.archive.size()) - 1;
  }

  void record(const FamilyEntry& target, const std::vector<int>& family_ids,
              const Certificate& cert) {
    CertRecord rec;
    rec.target_id = target.archive_id;
    rec.family_ids = family_ids;
    rec.tau = cert.weights;
    rec.value = cert.value;
    rec.threshold = opts.solver.eps_cert * (1.0 + target.form.mat.frobenius());
    result.certificates.push_back(std::move(rec));
  }

  void gather_family(const FamilyState& st, std::vector<HomForm>& forms,
                     std::vector<int>& ids) const {
    forms.clear();
    ids.clear();
    for (std::size_t i = 0; i < st.quad_family.size(); ++i)
      if (st.quad_alive[i]) {
        forms.push_back(st.quad_family[i].form);
        ids.push_back(st.quad_family[i].archive_id);
      }
    for (std::size_t i = 0; i < st.h_lower_family.size(); ++i)
      if (st.h_lower_alive[i]) {
        forms.push_back(st.h_lower_family[i].form);
        ids.push_back(st.h_lower_family[i].archive_id);
      }
  }

  /// Certified-dominated members are removed; quadratic entries first, then
  /// lower envelopes, each in creation order. True nonlinear constraints are
  /// untouched, so membership is unchanged.
  void prune(FamilyState& st, int k) {
    struct Item {
      bool lower;
      std::size_t idx;
    };
    std::vector<Item> items;
    for (std::size_t i = 0; i < st.quad_family.size(); ++i)
      if (st.quad_alive[i]) items.push_back({false, i});
    for (std::size_t i = 0; i < st.h_lower_family.size(); ++i)
      if (st.h_lower_alive[i]) items.push_back({true, i});
    if (items.size() < 2) return;

    SolverOptions reduced = opts.solver;
    reduced.max_iters = std::max(300, opts.solver.max_iters / 4);
    for (std::size_t ord = 0; ord < items.size(); ++ord) {
      const Item it = items[ord];
      const FamilyEntry& cand =
          it.lower ? st.h_lower_family[it.idx] : st.quad_family[it.idx];
      std::vector<HomForm> rest;
      std::vector<int> rest_ids;
      for (const Item other : items) {
        if (other.lower == it.lower && other.idx == it.idx) continue;
        const FamilyEntry& e =
            other.lower ? st.h_lower_family[other.idx] : st.quad_family[other.idx];
        const auto& alive = other.lower ? st.h_lower_alive : st.quad_alive;
        if (!alive[other.idx]) continue;
        rest.push_back(e.form);
        rest_ids.push_back(e.archive_id);
      }
      if (rest.empty()) continue;
      reduced.seed = mix(mix(opts.solver.seed, 0x70727565u + k), ord);
      Certificate cert = solve_certificate(cand.form, rest, reduced);
      result.stats.certificates_solved += 1;
      result.stats.solver_evaluations += cert.iterations;
      if (cert.certified()) {
        record(cand, rest_ids, cert);
        if (it.lower)
          st.h_lower_alive[it.idx] = 0;
        else
          st.quad_alive[it.idx] = 0;
        result.stats.pruned_total += 1;
      }
    }
  }

  RunResult run() {
    const auto t0 = std::chrono::steady_clock::now();
    const int num_modes = static_cast<int>(spec.system.modes.size());
    const int prune_every =
        opts.prune_every > 0 ? opts.prune_every : (num_modes > 1 ? 1 : 3);

    FamilyState st = init_family(spec.quad, spec.quasi);
    for (auto& e : st.quad_family) e.archive_id = archive(e.form);
    for (auto& e : st.h_upper) e.archive_id = archive(e.form);
    for (auto& e : st.h_lower_family) e.archive_id = archive(e.form);

    std::vector<HomForm> family;
    std::vector<int> family_ids;
    for (int k = 0;; ++k) {
      if (k > opts.k_max)
        throw IterationBudgetExceeded("no certificate after k_max = " +
                                      std::to_string(opts.k_max) + " iterations");
      if (k > 0 && k % prune_every == 0) prune(st, k);

      Proposal prop = propose(st, aug);
      for (auto& e : prop.new_quad) e.archive_id = archive(e.form);
      for (auto& e : prop.new_upper) e.archive_id = archive(e.form);
      for (auto& e : prop.new_lower) e.archive_id = archive(e.form);

      std::vector<const FamilyEntry*> targets;
      for (const auto& e : prop.new_quad) targets.push_back(&e);
      for (const auto& e : prop.new_upper) targets.push_back(&e);
      result.stats.targets_per_iteration.push_back(static_cast<int>(targets.size()));

      gather_family(st, family, family_ids);

      std::vector<Certificate> certs(targets.size());
      std::span<const HomForm> fam_span(family);
      parallel_for(static_cast<int>(targets.size()), threads, [&](int i) {
        SolverOptions so = opts.solver;
        so.seed = mix(mix(opts.solver.seed, k), i);
        certs[i] = solve_certificate(targets[i]->form, fam_span, so);
      });

      bool all_certified = true;
      for (std::size_t i = 0; i < targets.size(); ++i) {
        result.stats.certificates_solved += 1;
        result.stats.solver_evaluations += certs[i].iterations;
        if (certs[i].certified())
          record(*targets[i], family_ids, certs[i]);
        else
          all_certified = false;
      }

      if (all_certified) {
        finish(st, k);
        result.stats.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return std::move(result);
      }
      commit(st, std::move(prop));
    }
  }

  void finish(const FamilyState& st, int k_star) {
    InvariantSetDescription desc;
    desc.k_star = k_star;
    desc.n_input = spec.system.n;
    desc.system = spec.system;
    for (const FamilyEntry* e : st.alive_quad()) desc.hom_forms.push_back(*e);
    desc.quasi = spec.quasi;
    if (!spec.quasi.empty())
      desc.quasi_words =
          all_words_up_to(static_cast<int>(spec.system.modes.size()), k_star, 2'000'000);
    desc.transform = spec.transform;
    desc.source = spec;
    finalize_description(desc);
    result.desc = std::move(desc);
    result.stats.k_star = k_star;
    result.stats.family_size_final =
        static_cast<int>(st.alive_quad().size() + st.alive_lower().size());
  }
};

RunResult run_core(const ProblemSpec& spec, const RunOptions& opts) {
  CoreEngine engine(spec, opts);
  return engine.run();
}

QuadraticConstraint ball_constraint(Eigen::Index n, double dx) {
  QuadraticConstraint ball;
  ball.Q = SymMat(Mat::Identity(n, n) / dx);
  ball.q = Vec::Zero(n);
  return ball;
}

ProblemSpec prepare(const ProblemSpec& in) {
  validate_problem(in);
  ProblemSpec spec = in;
  if (spec.quad.empty()) {
    // Only nonlinear constraints given: dx declares the bounding ball, which
    // becomes the quadratic part of the constraint set.
    if (!spec.dx) throw MissingBallBound("nonlinear-only problems need dx");
    spec.quad.push_back(ball_constraint(spec.system.n, *spec.dx));
  } else {
    spec.quad = ensure_ball(spec.quad, spec.dx);
  }
  return spec;
}

}  // namespace

void finalize_description(InvariantSetDescription& desc) {
  desc.quasi_products.clear();
  desc.quasi_products.reserve(desc.quasi_words.size());
  for (const Word& w : desc.quasi_words)
    desc.quasi_products.push_back(word_product(desc.system, w));
}

RunResult run_algorithm1(const ProblemSpec& spec, const RunOptions& opts) {
  if (spec.system.modes.size() != 1)
    throw ValidationError("single-mode pipeline called with several modes");
  if (!spec.quasi.empty() || !spec.poly.empty())
    throw ValidationError("quadratic pipeline called with nonlinear constraints");
  validate_system(spec.system);
  return run_core(prepare(spec), opts);
}

RunResult run_algorithm2(const ProblemSpec& spec, const RunOptions& opts) {
  if (spec.system.modes.size() != 1)
    throw ValidationError("single-mode pipeline called with several modes");
  if (!spec.poly.empty())
    throw ValidationError("polynomial constraints take the lifted pipeline");
  validate_system(spec.system);
  return run_core(prepare(spec), opts);
}

RunResult run_switched(const ProblemSpec& spec, const RunOptions& opts) {
  if (spec.system.modes.size() < 2)
    throw ValidationError("switched pipeline needs at least two modes");
  if (!spec.poly.empty())
    throw ValidationError("the lifted pipeline supports a single mode only");
  validate_system(spec.system);
  return run_core(prepare(spec), opts);
}

RunResult run_transformed(const ProblemSpec& spec, const RunOptions& opts) {
  if (!spec.transform) throw ValidationError("no transform present");
  if (spec.system.modes.size() != 1)
    throw ValidationError("transformed pipeline supports a single mode");
  if (!spec.poly.empty())
    throw ValidationError("polynomial constraints cannot be combined with a transform");
  validate_system(spec.system);
  return run_core(prepare(spec), opts);
}

RunResult compute(const ProblemSpec& spec, const RunOptions& opts) {
  if (!spec.poly.empty()) {
    if (spec.transform)
      throw ValidationError("polynomial constraints cannot be combined with a transform");
    if (!spec.quasi.empty())
      throw ValidationError(
          "polynomial and quasi-smooth constraints cannot be mixed in one problem");
    if (spec.system.modes.size() != 1)
      throw ValidationError("the lifted pipeline supports a single mode only");
    return run_lifted(spec, opts);
  }
  if (spec.transform) return run_transformed(spec, opts);
  if (spec.system.modes.size() > 1) return run_switched(spec, opts);
  if (!spec.quasi.empty()) return run_algorithm2(spec, opts);
  return run_algorithm1(spec, opts);
}

RunResult run_lifted(const ProblemSpec& spec, const RunOptions& opts) {
  if (spec.poly.empty()) throw ValidationError("no polynomial constraints to lift");
  if (spec.system.modes.size() != 1)
    throw ValidationError("the lifted pipeline supports a single mode only");
  if (spec.transform || !spec.quasi.empty())
    throw ValidationError("the lifted pipeline takes quadratic and polynomial "
                          "constraints only");
  if (!spec.dx)
    throw MissingBallBound("the lifted pipeline needs dx to bound the lifted state");
  validate_system(spec.system);
  validate_problem(spec);

  ProblemSpec staged = spec;
  if (staged.quad.empty())
    staged.quad.push_back(ball_constraint(staged.system.n, *staged.dx));
  LiftedProblem lp =
      build_lifted_problem(staged.system, staged.quad, staged.poly, *staged.dx);

  ProblemSpec zspec;
  zspec.system = lp.tilde;
  zspec.quad = lp.xz;
  RunResult result = run_core(zspec, opts);
  result.desc.n_input = staged.system.n;
  result.desc.lift = LiftBackMap{lp.basis};
  result.desc.source = staged;
  return result;
}

bool membership(const InvariantSetDescription& desc, const Vec& x) {
  return membership(desc, x, desc.tol_mem);
}

bool membership(const InvariantSetDescription& desc, const Vec& x, double tol) {
  if (x.size() != desc.n_input)
    throw DimensionMismatch("membership query dimension mismatch");
  Vec z = x;
  if (desc.transform) z = desc.transform->forward(z);
  if (desc.lift) z = lift_vector(z, desc.lift->basis);
  for (const FamilyEntry& e : desc.hom_forms)
    if (e.form.eval(z) > tol) return false;
  for (std::size_t w = 0; w < desc.quasi_words.size(); ++w) {
    const Vec zw = desc.quasi_products[w] * z;
    for (const auto& c : desc.quasi)
      if (c.h(zw) > 1.0 + tol) return false;
  }
  return true;
}

}  // namespace invariset
