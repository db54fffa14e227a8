#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "invariset/certify.hpp"
#include "invariset/io.hpp"
#include "invariset/iterate.hpp"
#include "invariset/oracle.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitValidation = 2;
constexpr int kExitBudget = 3;

int cmd_compute(const std::string& problem_path, const std::string& out_path,
                int k_max_override, long seed_override) {
  auto [spec, opts] = invariset::io::load_problem(problem_path);
  if (k_max_override >= 0) opts.k_max = k_max_override;
  if (seed_override >= 0) opts.solver.seed = static_cast<std::uint64_t>(seed_override);
  invariset::RunResult result = invariset::compute(spec, opts);
  invariset::io::save_text(out_path, invariset::io::result_to_json(result));
  std::printf("k_star=%d forms=%zu certificates=%zu out=%s\n", result.desc.k_star,
              result.desc.hom_forms.size(), result.certificates.size(), out_path.c_str());
  return kExitOk;
}

int cmd_check(const std::string& desc_path, const std::vector<double>& point) {
  invariset::InvariantSetDescription desc = invariset::io::load_description(desc_path);
  invariset::Vec x(static_cast<Eigen::Index>(point.size()));
  for (std::size_t i = 0; i < point.size(); ++i) x(i) = point[i];
  const bool inside = invariset::membership(desc, x);
  std::printf("%s\n", inside ? "inside" : "outside");
  return kExitOk;
}

int cmd_scan(const std::string& desc_path, const std::vector<double>& box, int resolution,
             const std::string& out_path) {
  invariset::InvariantSetDescription desc = invariset::io::load_description(desc_path);
  if (box.size() != 2 * static_cast<std::size_t>(desc.n_input))
    throw invariset::ValidationError("--box needs lo/hi per axis");
  std::vector<std::pair<double, double>> box_pairs;
  for (std::size_t i = 0; i + 1 < box.size(); i += 2)
    box_pairs.emplace_back(box[i], box[i + 1]);
  auto scan = invariset::oracle::grid_membership_scan(desc, box_pairs, resolution);
  invariset::io::save_text(out_path, invariset::io::scan_to_csv(scan));
  std::printf("rows=%zu out=%s\n", scan.verdicts.size(), out_path.c_str());
  return kExitOk;
}

int cmd_bench(int n, int count, long seed, const std::string& out_path) {
  std::string report = "# invariset bench report\n\n";
  char line[160];
  std::snprintf(line, sizeof(line), "n=%d count=%d seed=%ld\n\n", n, count, seed);
  report += line;
  double sum_iters = 0.0, sum_const = 0.0;
  if (count > 0) {
    report += "| seed | n_iter | n_const |\n|---:|---:|---:|\n";
    for (int i = 0; i < count; ++i) {
      const std::uint64_t inst_seed = static_cast<std::uint64_t>(seed) + i;
      invariset::ProblemSpec spec = invariset::oracle::random_switched_instance(n, inst_seed);
      invariset::RunOptions opts;
      opts.solver.seed = inst_seed;
      invariset::RunResult result = invariset::run_switched(spec, opts);
      std::vector<invariset::HomForm> forms;
      for (const auto& e : result.desc.hom_forms) forms.push_back(e.form);
      const auto prune = invariset::prune_family(forms, opts.solver);
      const int n_const = static_cast<int>(prune.retained.size());
      sum_iters += result.desc.k_star;
      sum_const += n_const;
      std::snprintf(line, sizeof(line), "| %llu | %d | %d |\n",
                    static_cast<unsigned long long>(inst_seed), result.desc.k_star, n_const);
      report += line;
    }
    std::snprintf(line, sizeof(line), "\nmean n_iter = %.2f\nmean n_const = %.2f\n",
                  sum_iters / count, sum_const / count);
    report += line;
  }
  invariset::io::save_text(out_path, report);
  std::printf("instances=%d out=%s\n", count, out_path.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximal constraint-admissible invariant sets for linear and "
               "switched linear systems"};
  app.require_subcommand(1);

  std::string problem_path, desc_path, out_path;
  std::vector<double> point, box;
  int resolution = 201;
  int k_max_override = -1;
  long seed = 0, seed_override = -1;
  int bench_n = 2, bench_count = 20;

  auto* compute = app.add_subcommand("compute", "Compute the maximal invariant set");
  compute->add_option("problem", problem_path, "Problem JSON file")->required();
  compute->add_option("--out", out_path, "Output description JSON")->required();
  compute->add_option("--k-max", k_max_override, "Iteration budget override");
  compute->add_option("--seed", seed_override, "Solver seed override");

  auto* check = app.add_subcommand("check", "Membership of a point");
  check->add_option("description", desc_path, "Description JSON file")->required();
  check->add_option("point", point, "Point coordinates")->required();

  auto* scan = app.add_subcommand("scan", "Membership verdicts on a grid, as CSV");
  scan->add_option("description", desc_path, "Description JSON file")->required();
  scan->add_option("--box", box, "Per-axis lo hi pairs")->required();
  scan->add_option("--resolution", resolution, "Points per axis");
  scan->add_option("--out", out_path, "Output CSV path")->required();

  auto* bench = app.add_subcommand("bench", "Random switched benchmark instances");
  bench->add_option("--n", bench_n, "State dimension");
  bench->add_option("--count", bench_count, "Number of instances");
  bench->add_option("--seed", seed, "Base seed");
  bench->add_option("--out", out_path, "Output report path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (compute->parsed())
      return cmd_compute(problem_path, out_path, k_max_override, seed_override);
    if (check->parsed()) return cmd_check(desc_path, point);
    if (scan->parsed()) return cmd_scan(desc_path, box, resolution, out_path);
    if (bench->parsed()) return cmd_bench(bench_n, bench_count, seed, out_path);
  } catch (const invariset::IterationBudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const invariset::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const invariset::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
