#pragma once

#include <optional>
#include <span>
#include <vector>

#include "invariset/certify.hpp"
#include "invariset/lift.hpp"
#include "invariset/types.hpp"

namespace invariset {

/// Mode word in switching-signal order: word[0] is applied to the state first,
/// so the product behind a word is A_w = A_{w.back()} * ... * A_{w.front()}.
/// The empty word is the identity.
using Word = std::vector<int>;

Mat word_product(const SystemModel& s, const Word& w);

enum class FormSource { Quadratic, QuasiLower, QuasiUpper };

/// One certificate-family member: the pullback of an original constraint form
/// through the augmented dynamics along `word`.
struct FamilyEntry {
  Word word;
  int constraint_index = 0;
  FormSource source = FormSource::Quadratic;
  HomForm form;
  int archive_id = -1;
};

/// Evolving certificate families: the quadratic family grows, the lower
/// envelope family grows, the upper envelope frontier is wholly replaced at
/// each step. Frontiers index entries whose word length equals k.
struct FamilyState {
  int k = 0;
  std::vector<FamilyEntry> quad_family;
  std::vector<char> quad_alive;
  std::vector<int> quad_frontier;
  std::vector<FamilyEntry> h_lower_family;
  std::vector<char> h_lower_alive;
  std::vector<int> h_lower_frontier;
  std::vector<FamilyEntry> h_upper;

  std::vector<const FamilyEntry*> alive_quad() const;
  std::vector<const FamilyEntry*> alive_lower() const;
};

/// Initial families from homogenized constraints (word = empty).
FamilyState init_family(const std::vector<QuadraticConstraint>& quad,
                        const std::vector<QuasiSmoothConstraint>& quasi);

/// One family step: frontier pullbacks through every mode, deduplicated
/// against the family; the family grows and k increments.
void step_quadratic(FamilyState& state, const SystemModel& modes);

/// Quadratic step plus envelope updates: the upper frontier is replaced by its
/// pullbacks, the lower family is extended by pullbacks of its frontier.
void step_quasismooth(FamilyState& state, const SystemModel& modes);

/// Back-map of a lifted run: membership lifts the point first.
struct LiftBackMap {
  MonomialBasis basis;
};

/// Certified output set: evaluating the retained homogeneous forms and the
/// true nonlinear constraints along all stored words decides membership
/// exactly.
struct InvariantSetDescription {
  int k_star = 0;
  Eigen::Index n_input = 0;           // dimension membership queries live in
  SystemModel system;                 // dynamics in the working space
  std::vector<FamilyEntry> hom_forms; // retained quadratic-family entries
  std::vector<QuasiSmoothConstraint> quasi;
  std::vector<Word> quasi_words;      // all words of length <= k_star
  std::vector<Mat> quasi_products;    // cached word products, aligned
  std::optional<Transform> transform; // x -> working space
  std::optional<LiftBackMap> lift;
  ProblemSpec source;                 // effective problem (normalized, ball added)
  double tol_mem = 1e-9;
};

/// Re-checkable record of one certified solve; matrices live in `archive`.
struct CertRecord {
  int target_id = -1;
  std::vector<int> family_ids;
  Vec tau;
  double value = 0.0;
  double threshold = 0.0;
};

struct RunStats {
  int k_star = 0;
  long certificates_solved = 0;
  long solver_evaluations = 0;
  int family_size_final = 0;
  int pruned_total = 0;
  std::vector<int> targets_per_iteration;
  double seconds = 0.0;
};

struct RunResult {
  InvariantSetDescription desc;
  std::vector<SymMat> archive;
  std::vector<CertRecord> certificates;
  RunStats stats;
};

/// Quadratic constraints only, single mode.
RunResult run_algorithm1(const ProblemSpec& spec, const RunOptions& opts);

/// Quadratic plus quasi-smooth constraints, single mode. Membership of the
/// output uses the true nonlinear constraints along words, not the envelopes.
RunResult run_algorithm2(const ProblemSpec& spec, const RunOptions& opts);

/// Arbitrary switching over >= 2 modes; pruning runs every iteration.
RunResult run_switched(const ProblemSpec& spec, const RunOptions& opts);

/// Linearizable nonlinear system: runs the linear pipeline in y-coordinates
/// on the caller-supplied y-space constraints; membership of x tests T(x).
RunResult run_transformed(const ProblemSpec& spec, const RunOptions& opts);

/// Semialgebraic constraints via the monomial lift (single mode): runs the
/// quadratic pipeline on the lifted problem and stores the back-map.
RunResult run_lifted(const ProblemSpec& spec, const RunOptions& opts);

/// Dispatch: polynomial constraints -> lifted; transform -> transformed;
/// quasi-smooth -> algorithm 2; several modes -> switched; else algorithm 1.
RunResult compute(const ProblemSpec& spec, const RunOptions& opts);

/// Exact membership test at tolerance `tol` (defaults to desc.tol_mem).
bool membership(const InvariantSetDescription& desc, const Vec& x);
bool membership(const InvariantSetDescription& desc, const Vec& x, double tol);

/// Rebuilds the cached word products; required after deserializing.
void finalize_description(InvariantSetDescription& desc);

}  // namespace invariset
