#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "invariset/certify.hpp"
#include "invariset/io.hpp"
#include "invariset/iterate.hpp"
#include "invariset/lift.hpp"
#include "invariset/oracle.hpp"

namespace py = pybind11;
using namespace invariset;

namespace {

std::vector<HomForm> forms_from(const std::vector<Mat>& mats) {
  std::vector<HomForm> forms;
  forms.reserve(mats.size());
  for (const Mat& m : mats) forms.push_back(HomForm{SymMat(m)});
  return forms;
}

py::dict cert_to_dict(const Certificate& c) {
  py::dict d;
  d["certified"] = c.certified();
  d["value"] = c.value;
  d["weights"] = Vec(c.weights);
  d["iterations"] = c.iterations;
  return d;
}

}  // namespace

PYBIND11_MODULE(_invariset, m) {
  m.doc() = "Maximal constraint-admissible invariant sets for linear and "
            "switched linear systems";

  m.def(
      "compute",
      [](const std::string& problem_json) {
        auto [spec, opts] = io::parse_problem(problem_json);
        return io::result_to_json(invariset::compute(spec, opts));
      },
      py::arg("problem_json"),
      "Run the full pipeline on a problem JSON document; returns the "
      "description JSON.");

  m.def(
      "membership",
      [](const std::string& description_json, const Vec& x) {
        return invariset::membership(io::description_from_json(description_json), x);
      },
      py::arg("description_json"), py::arg("x"));

  m.def(
      "lambda_max",
      [](const Mat& mat) { return lambda_max(SymMat(mat)); },
      py::arg("mat"), "Largest eigenvalue and unit eigenvector of a symmetric matrix.");

  m.def(
      "evaluate_r",
      [](const Mat& q, const std::vector<Mat>& family, const Vec& tau) {
        return evaluate_r(HomForm{SymMat(q)}, forms_from(family), tau);
      },
      py::arg("q"), py::arg("family"), py::arg("tau"));

  m.def(
      "solve_certificate",
      [](const Mat& q, const std::vector<Mat>& family, double eps_cert, int max_iters,
         std::uint64_t seed) {
        SolverOptions opts;
        opts.eps_cert = eps_cert;
        opts.max_iters = max_iters;
        opts.seed = seed;
        return cert_to_dict(solve_certificate(HomForm{SymMat(q)}, forms_from(family), opts));
      },
      py::arg("q"), py::arg("family"), py::arg("eps_cert") = 1e-9,
      py::arg("max_iters") = 2000, py::arg("seed") = 0);

  m.def(
      "brute_force_r",
      [](const Mat& q, const std::vector<Mat>& family, double lo, double hi, int steps) {
        return oracle::brute_force_r(HomForm{SymMat(q)}, forms_from(family), {lo, hi},
                                     steps);
      },
      py::arg("q"), py::arg("family"), py::arg("lo"), py::arg("hi"), py::arg("steps"));

  m.def(
      "monomial_exponents",
      [](int n, int d) {
        const MonomialBasis basis = monomial_basis(n, d);
        return basis.exponents;
      },
      py::arg("n"), py::arg("d"),
      "Multi-index layout of the monomial lift basis.");

  m.def(
      "lift_vector",
      [](const Vec& x, int d) { return lift_vector(x, monomial_basis(x.size(), d)); },
      py::arg("x"), py::arg("d"));

  m.def(
      "lift_map",
      [](const Mat& a, int d) { return lift_map(a, monomial_basis(a.rows(), d)); },
      py::arg("a"), py::arg("d"));

  m.def("jsr_upper_bound", &oracle::jsr_upper_bound, py::arg("modes"),
        py::arg("depth") = 8);

  m.def("polyhedral_kmin_2d", &oracle::polyhedral_kmin_2d, py::arg("q"), py::arg("a"));

  m.def(
      "simulate",
      [](const std::vector<Mat>& modes, const Vec& x0, const std::vector<int>& word) {
        return oracle::simulate(SystemModel(modes), x0, word);
      },
      py::arg("modes"), py::arg("x0"), py::arg("word"));

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<IterationBudgetExceeded>(m, "IterationBudgetExceeded",
                                                  PyExc_RuntimeError);
}
