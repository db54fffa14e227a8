#include "invariset/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "invariset/expr.hpp"
#include "invariset/model.hpp"

#include "json.hpp"

namespace invariset::io {

using nlohmann::json;

namespace {

Mat matrix_from_json(const json& j) {
  if (j.is_object()) {
    // {"dim": d, "data": [row-major]} or {"rows": r, "cols": c, "data": [...]}
    const int rows = j.contains("dim") ? j.at("dim").get<int>() : j.at("rows").get<int>();
    const int cols = j.contains("dim") ? rows : j.at("cols").get<int>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (static_cast<int>(data.size()) != rows * cols)
      throw ValidationError("matrix data length does not match its dimensions");
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int c = 0; c < cols; ++c) m(i, c) = data[i * cols + c];
    return m;
  }
  if (!j.is_array() || j.empty())
    throw ValidationError("matrix must be a nested array or {dim, data}");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j.at(0).size());
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j.at(i).size()) != cols)
      throw ValidationError("matrix rows have inconsistent lengths");
    for (int c = 0; c < cols; ++c) m(i, c) = j.at(i).at(c).get<double>();
  }
  return m;
}

Vec vector_from_json(const json& j) {
  const auto data = j.get<std::vector<double>>();
  Vec v(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) v(i) = data[i];
  return v;
}

json matrix_to_json(const Mat& m) {
  json out;
  out["dim"] = m.rows();
  if (m.rows() != m.cols()) {
    out.erase("dim");
    out["rows"] = m.rows();
    out["cols"] = m.cols();
  }
  std::vector<double> data;
  data.reserve(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(i, c));
  out["data"] = std::move(data);
  return out;
}

json vector_to_json(const Vec& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

VectorMap map_from_exprs(const std::vector<std::string>& component_exprs, int n) {
  std::vector<Expr> parsed;
  parsed.reserve(component_exprs.size());
  for (const auto& text : component_exprs) parsed.push_back(parse_expr(text, n));
  VectorMap map;
  map.exprs = component_exprs;
  map.f = [parsed, n](const Vec& x) {
    Vec y(static_cast<Eigen::Index>(parsed.size()));
    for (std::size_t i = 0; i < parsed.size(); ++i) y(i) = evaluate(parsed[i], x);
    return y;
  };
  return map;
}

QuasiSmoothConstraint quasi_from_json(const json& j, int n) {
  QuasiSmoothConstraint c;
  c.expr = j.at("expr").get<std::string>();
  const Expr parsed = parse_expr(c.expr, n);
  c.h = [parsed](const Vec& x) { return evaluate(parsed, x); };
  c.h0 = j.at("h0").get<double>();
  c.grad0 = vector_from_json(j.at("grad0"));
  c.lipschitz = j.at("L").get<double>();
  if (c.grad0.size() != n)
    throw ValidationError("quasi-smooth grad0 has the wrong dimension");
  return c;
}

/// Expands and normalizes one polynomial entry; degree <= 2 results are
/// returned through `quad_out` instead.
void polynomial_from_json(const json& j, int n,
                          std::vector<QuadraticConstraint>& quad_out,
                          std::vector<PolynomialConstraint>& poly_out) {
  const std::string text = j.at("expr").get<std::string>();
  const double rhs = j.value("rhs", 1.0);
  const Expr parsed = parse_expr(text, n);
  auto terms = expand_polynomial(parsed, n);

  double constant = 0.0;
  std::vector<PolynomialTerm> reduced;
  for (auto& t : terms) {
    int total = 0;
    for (int a : t.alpha) total += a;
    if (total == 0)
      constant += t.coeff;
    else
      reduced.push_back(std::move(t));
  }
  const double effective_rhs = rhs - constant;
  if (effective_rhs <= 0.0)
    throw ValidationError("polynomial constraint excludes the origin");
  for (auto& t : reduced) t.coeff /= effective_rhs;

  PolynomialConstraint poly;
  poly.terms = std::move(reduced);
  poly.n = n;
  poly.expr = text;
  if (poly.degree() <= 2) {
    Mat q_mat = Mat::Zero(n, n);
    Vec q_vec = Vec::Zero(n);
    for (const auto& t : poly.terms) {
      int total = 0;
      for (int a : t.alpha) total += a;
      if (total == 1) {
        for (int i = 0; i < n; ++i)
          if (t.alpha[i] == 1) q_vec(i) += 0.5 * t.coeff;
      } else {
        std::vector<int> vars;
        for (int i = 0; i < n; ++i)
          for (int a = 0; a < t.alpha[i]; ++a) vars.push_back(i);
        if (vars[0] == vars[1]) {
          q_mat(vars[0], vars[0]) += t.coeff;
        } else {
          q_mat(vars[0], vars[1]) += 0.5 * t.coeff;
          q_mat(vars[1], vars[0]) += 0.5 * t.coeff;
        }
      }
    }
    QuadraticConstraint qc;
    qc.Q = SymMat(q_mat);
    qc.q = q_vec;
    quad_out.push_back(std::move(qc));
  } else {
    poly_out.push_back(std::move(poly));
  }
}

}  // namespace

std::pair<ProblemSpec, RunOptions> parse_problem(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("problem file is not valid JSON: ") + e.what());
  }
  try {
    ProblemSpec spec;
    const json& sys = j.at("system");
    if (sys.contains("transformed")) {
      const json& tr = sys.at("transformed");
      std::vector<Mat> modes;
      for (const auto& m : tr.at("modes")) modes.push_back(matrix_from_json(m));
      spec.system = SystemModel(std::move(modes));
      const int n = static_cast<int>(spec.system.n);
      Transform transform;
      transform.forward = map_from_exprs(tr.at("T").get<std::vector<std::string>>(), n);
      transform.inverse = map_from_exprs(tr.at("Tinv").get<std::vector<std::string>>(), n);
      if (static_cast<int>(transform.forward.exprs.size()) != n ||
          static_cast<int>(transform.inverse.exprs.size()) != n)
        throw ValidationError("transform component count must match the dimension");
      spec.transform = std::move(transform);
    } else {
      std::vector<Mat> modes;
      for (const auto& m : sys.at("modes")) modes.push_back(matrix_from_json(m));
      spec.system = SystemModel(std::move(modes));
    }
    const int n = static_cast<int>(spec.system.n);

    for (const auto& c : j.value("quadratic", json::array())) {
      Mat q_mat = c.contains("Q") ? matrix_from_json(c.at("Q")) : Mat::Zero(n, n);
      Vec q_vec = c.contains("q") ? vector_from_json(c.at("q")) : Vec::Zero(n);
      if (q_mat.rows() != n || q_vec.size() != n)
        throw ValidationError("quadratic constraint dimension mismatch");
      spec.quad.push_back(normalize_quadratic(SymMat(q_mat), q_vec, c.value("rhs", 1.0)));
    }
    for (const auto& c : j.value("quasismooth", json::array()))
      spec.quasi.push_back(quasi_from_json(c, n));
    for (const auto& c : j.value("polynomial", json::array()))
      polynomial_from_json(c, n, spec.quad, spec.poly);
    if (j.contains("dx")) spec.dx = j.at("dx").get<double>();

    RunOptions opts;
    if (j.contains("options")) {
      const json& o = j.at("options");
      opts.k_max = o.value("k_max", opts.k_max);
      opts.solver.eps_cert = o.value("eps_cert", opts.solver.eps_cert);
      opts.solver.max_iters = o.value("max_iters", opts.solver.max_iters);
      opts.solver.seed = o.value("seed", opts.solver.seed);
      opts.prune_every = o.value("prune_every", opts.prune_every);
    }
    return {std::move(spec), opts};
  } catch (const json::exception& e) {
    throw ValidationError(std::string("problem file schema error: ") + e.what());
  }
}

std::pair<ProblemSpec, RunOptions> load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open problem file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str());
}

namespace {

const char* source_name(FormSource s) {
  switch (s) {
    case FormSource::Quadratic:
      return "quadratic";
    case FormSource::QuasiLower:
      return "lower";
    case FormSource::QuasiUpper:
      return "upper";
  }
  return "quadratic";
}

FormSource source_from_name(const std::string& name) {
  if (name == "lower") return FormSource::QuasiLower;
  if (name == "upper") return FormSource::QuasiUpper;
  return FormSource::Quadratic;
}

json spec_to_json(const ProblemSpec& spec) {
  json out;
  json modes = json::array();
  for (const Mat& m : spec.system.modes) modes.push_back(matrix_to_json(m));
  out["modes"] = std::move(modes);
  if (spec.transform) {
    out["T"] = spec.transform->forward.exprs;
    out["Tinv"] = spec.transform->inverse.exprs;
  }
  json quads = json::array();
  for (const auto& c : spec.quad) {
    json q;
    q["Q"] = matrix_to_json(c.Q.mat());
    q["q"] = vector_to_json(c.q);
    quads.push_back(std::move(q));
  }
  out["quadratic"] = std::move(quads);
  json quasis = json::array();
  for (const auto& c : spec.quasi) {
    json q;
    q["expr"] = c.expr;
    q["h0"] = c.h0;
    q["grad0"] = vector_to_json(c.grad0);
    q["L"] = c.lipschitz;
    quasis.push_back(std::move(q));
  }
  out["quasismooth"] = std::move(quasis);
  json polys = json::array();
  for (const auto& c : spec.poly) {
    json p;
    p["expr"] = c.expr;
    json terms = json::array();
    for (const auto& t : c.terms) terms.push_back({{"alpha", t.alpha}, {"coeff", t.coeff}});
    p["terms"] = std::move(terms);
    polys.push_back(std::move(p));
  }
  out["polynomial"] = std::move(polys);
  if (spec.dx) out["dx"] = *spec.dx;
  return out;
}

ProblemSpec spec_from_json(const json& j) {
  ProblemSpec spec;
  std::vector<Mat> modes;
  for (const auto& m : j.at("modes")) modes.push_back(matrix_from_json(m));
  spec.system = SystemModel(std::move(modes));
  const int n = static_cast<int>(spec.system.n);
  if (j.contains("T")) {
    Transform t;
    t.forward = map_from_exprs(j.at("T").get<std::vector<std::string>>(), n);
    t.inverse = map_from_exprs(j.at("Tinv").get<std::vector<std::string>>(), n);
    spec.transform = std::move(t);
  }
  for (const auto& c : j.value("quadratic", json::array())) {
    QuadraticConstraint qc;
    qc.Q = SymMat(matrix_from_json(c.at("Q")));
    qc.q = vector_from_json(c.at("q"));
    spec.quad.push_back(std::move(qc));
  }
  for (const auto& c : j.value("quasismooth", json::array()))
    spec.quasi.push_back(quasi_from_json(c, n));
  for (const auto& c : j.value("polynomial", json::array())) {
    PolynomialConstraint p;
    p.n = n;
    p.expr = c.value("expr", std::string());
    for (const auto& t : c.at("terms")) {
      PolynomialTerm term;
      term.alpha = t.at("alpha").get<std::vector<int>>();
      term.coeff = t.at("coeff").get<double>();
      p.terms.push_back(std::move(term));
    }
    spec.poly.push_back(std::move(p));
  }
  if (j.contains("dx")) spec.dx = j.at("dx").get<double>();
  return spec;
}

}  // namespace

std::string result_to_json(const RunResult& result) {
  const InvariantSetDescription& desc = result.desc;
  json out;
  out["k_star"] = desc.k_star;
  out["n_input"] = desc.n_input;
  out["tol_mem"] = desc.tol_mem;

  json system = json::array();
  for (const Mat& m : desc.system.modes) system.push_back(matrix_to_json(m));
  out["system"] = std::move(system);

  json forms = json::array();
  for (const auto& e : desc.hom_forms) {
    json f;
    f["word"] = e.word;
    f["constraint"] = e.constraint_index;
    f["source"] = source_name(e.source);
    f["mat"] = matrix_to_json(e.form.mat.mat());
    forms.push_back(std::move(f));
  }
  out["forms"] = std::move(forms);

  json quasi = json::array();
  for (const auto& c : desc.quasi) {
    json q;
    q["expr"] = c.expr;
    q["h0"] = c.h0;
    q["grad0"] = vector_to_json(c.grad0);
    q["L"] = c.lipschitz;
    quasi.push_back(std::move(q));
  }
  out["quasismooth"] = std::move(quasi);
  out["quasi_words"] = desc.quasi_words;

  if (desc.transform) {
    out["transform"] = {{"T", desc.transform->forward.exprs},
                        {"Tinv", desc.transform->inverse.exprs}};
  }
  if (desc.lift) out["lift"] = {{"n", desc.lift->basis.n}, {"d", desc.lift->basis.d}};
  out["source"] = spec_to_json(desc.source);

  json archive = json::array();
  for (const SymMat& m : result.archive) archive.push_back(matrix_to_json(m.mat()));
  out["archive"] = std::move(archive);

  json certs = json::array();
  for (const auto& rec : result.certificates) {
    json c;
    c["target"] = rec.target_id;
    c["family"] = rec.family_ids;
    c["tau"] = vector_to_json(rec.tau);
    c["value"] = rec.value;
    c["threshold"] = rec.threshold;
    certs.push_back(std::move(c));
  }
  out["certificates"] = std::move(certs);

  out["stats"] = {{"k_star", result.stats.k_star},
                  {"certificates_solved", result.stats.certificates_solved},
                  {"solver_evaluations", result.stats.solver_evaluations},
                  {"family_size_final", result.stats.family_size_final},
                  {"pruned_total", result.stats.pruned_total},
                  {"targets_per_iteration", result.stats.targets_per_iteration},
                  {"seconds", result.stats.seconds}};
  return out.dump(2);
}

InvariantSetDescription description_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("description file is not valid JSON: ") + e.what());
  }
  try {
    InvariantSetDescription desc;
    desc.k_star = j.at("k_star").get<int>();
    desc.n_input = j.at("n_input").get<Eigen::Index>();
    desc.tol_mem = j.value("tol_mem", 1e-9);
    std::vector<Mat> modes;
    for (const auto& m : j.at("system")) modes.push_back(matrix_from_json(m));
    desc.system = SystemModel(std::move(modes));
    const int n = static_cast<int>(desc.system.n);

    for (const auto& f : j.at("forms")) {
      FamilyEntry e;
      e.word = f.at("word").get<Word>();
      e.constraint_index = f.at("constraint").get<int>();
      e.source = source_from_name(f.value("source", "quadratic"));
      e.form = HomForm{SymMat(matrix_from_json(f.at("mat")))};
      desc.hom_forms.push_back(std::move(e));
    }
    for (const auto& c : j.value("quasismooth", json::array()))
      desc.quasi.push_back(quasi_from_json(c, n));
    desc.quasi_words = j.value("quasi_words", std::vector<Word>{});
    if (j.contains("transform")) {
      Transform t;
      t.forward = map_from_exprs(j.at("transform").at("T").get<std::vector<std::string>>(),
                                 static_cast<int>(desc.n_input));
      t.inverse = map_from_exprs(j.at("transform").at("Tinv").get<std::vector<std::string>>(),
                                 static_cast<int>(desc.n_input));
      desc.transform = std::move(t);
    }
    if (j.contains("lift")) {
      LiftBackMap lift;
      lift.basis = monomial_basis(j.at("lift").at("n").get<int>(),
                                  j.at("lift").at("d").get<int>());
      desc.lift = std::move(lift);
    }
    if (j.contains("source")) desc.source = spec_from_json(j.at("source"));
    finalize_description(desc);
    return desc;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("description schema error: ") + e.what());
  }
}

InvariantSetDescription load_description(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open description file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return description_from_json(buf.str());
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << text;
}

std::string scan_to_csv(const oracle::GridScan& scan) {
  if (scan.box.size() != 2)
    throw ValidationError("CSV export is defined for 2-D scans");
  std::string csv = "x1,x2,member\n";
  char buf[64];
  const int res = scan.resolution;
  for (int i = 0; i < res; ++i)
    for (int k = 0; k < res; ++k) {
      const auto [lo1, hi1] = scan.box[0];
      const auto [lo2, hi2] = scan.box[1];
      const double x1 = res == 1 ? lo1 : lo1 + (hi1 - lo1) * i / (res - 1);
      const double x2 = res == 1 ? lo2 : lo2 + (hi2 - lo2) * k / (res - 1);
      std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%d\n", x1, x2,
                    scan.verdicts[static_cast<std::size_t>(i) * res + k] ? 1 : 0);
      csv += buf;
    }
  return csv;
}

}  // namespace invariset::io
