// Drives the installed CLI binary end to end. Invoked as:
//   cli_tests <path-to-cli> <fixtures-dir>
#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string g_cli;
std::string g_fixtures;
std::filesystem::path g_workdir;

int run(const std::string& args) {
  const std::string cmd = g_cli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string capture(const std::string& args) {
  const auto out = g_workdir / "stdout.txt";
  const std::string cmd = g_cli + " " + args + " >" + out.string() + " 2>/dev/null";
  if (std::system(cmd.c_str()) == -1) return "";
  std::ifstream in(out);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string fixture(const char* name) { return g_fixtures + "/" + name; }

}  // namespace

TEST_CASE("compute then check round trip") {
  const auto desc = (g_workdir / "circle.json").string();
  CHECK(run("compute " + fixture("circle.json") + " --out " + desc) == 0);

  const std::string inside = capture("check " + desc + " 0.0 0.0");
  CHECK(inside.find("inside") != std::string::npos);
  const std::string outside = capture("check " + desc + " 3.0 3.0");
  CHECK(outside.find("outside") != std::string::npos);
  CHECK(run("check " + desc + " 3.0 3.0") == 0);
}

TEST_CASE("compute failure exit codes") {
  // Unstable single mode -> validation failure.
  const auto bad = g_workdir / "unstable.json";
  std::ofstream(bad) << R"({"system": {"modes": [[[2.0]]]},
                            "quadratic": [{"Q": [[1.0]]}]})";
  CHECK(run("compute " + bad.string() + " --out " + (g_workdir / "o.json").string()) == 2);

  // Exhausted iteration budget.
  CHECK(run("compute " + fixture("circle.json") + " --k-max 1 --out " +
            (g_workdir / "o2.json").string()) == 3);

  // Missing file.
  CHECK(run("compute " + (g_workdir / "nope.json").string() + " --out " +
            (g_workdir / "o3.json").string()) == 2);
}

TEST_CASE("scan produces deterministic CSV") {
  const auto desc = (g_workdir / "circle_scan.json").string();
  REQUIRE(run("compute " + fixture("circle.json") + " --out " + desc) == 0);
  const auto csv_a = g_workdir / "scan_a.csv";
  const auto csv_b = g_workdir / "scan_b.csv";
  const std::string box = "--box -1 1 -1 1 --resolution 21";
  CHECK(run("scan " + desc + " " + box + " --out " + csv_a.string()) == 0);
  CHECK(run("scan " + desc + " " + box + " --out " + csv_b.string()) == 0);
  const std::string a = slurp(csv_a);
  CHECK(a == slurp(csv_b));
  CHECK(a.substr(0, 13) == "x1,x2,member\n");
  CHECK(a.find(",1\n") != std::string::npos);
  CHECK(a.find(",0\n") != std::string::npos);
}

TEST_CASE("lifted and transformed fixtures run through the CLI") {
  const auto wiener = (g_workdir / "wiener.json").string();
  const std::string wiener_log =
      capture("compute " + fixture("wiener.json") + " --out " + wiener);
  CHECK(wiener_log.find("k_star=5") != std::string::npos);
  CHECK(capture("check " + wiener + " 0.0 0.0").find("inside") != std::string::npos);
  CHECK(capture("check " + wiener + " 2.0 -2.0").find("outside") != std::string::npos);

  const auto transformed = (g_workdir / "transformed.json").string();
  const std::string tr_log =
      capture("compute " + fixture("transformed.json") + " --out " + transformed);
  CHECK(tr_log.find("k_star=3") != std::string::npos);
  CHECK(capture("check " + transformed + " 0.0 0.0").find("inside") !=
        std::string::npos);
  CHECK(capture("check " + transformed + " -0.9 0.9").find("outside") !=
        std::string::npos);
}

TEST_CASE("scan of the nonconvex instance excludes the carved disks") {
  const auto desc = (g_workdir / "quads.json").string();
  REQUIRE(run("compute " + fixture("nonconvex_quads.json") + " --out " + desc) == 0);
  const auto csv = g_workdir / "quads_scan.csv";
  // Degenerate boxes probe single points.
  CHECK(run("scan " + desc + " --box 0.5 0.5 0 0 --resolution 1 --out " +
            csv.string()) == 0);
  CHECK(slurp(csv).find(",0\n") != std::string::npos);
  CHECK(run("scan " + desc + " --box -0.5 -0.5 0 0 --resolution 1 --out " +
            csv.string()) == 0);
  CHECK(slurp(csv).find(",0\n") != std::string::npos);
  CHECK(run("scan " + desc + " --box 0 0 0 0 --resolution 1 --out " + csv.string()) ==
        0);
  CHECK(slurp(csv).find(",1\n") != std::string::npos);
}

TEST_CASE("results do not depend on the thread cap") {
  auto strip_seconds = [](std::string text) {
    const auto pos = text.find("\"seconds\"");
    if (pos != std::string::npos) {
      const auto end = text.find('\n', pos);
      text.erase(pos, end - pos);
    }
    return text;
  };
  const auto out1 = (g_workdir / "threads1.json").string();
  const auto out2 = (g_workdir / "threads2.json").string();
  setenv("INVARISET_THREADS", "1", 1);
  CHECK(run("compute " + fixture("quasismooth.json") + " --out " + out1) == 0);
  setenv("INVARISET_THREADS", "4", 1);
  CHECK(run("compute " + fixture("quasismooth.json") + " --out " + out2) == 0);
  unsetenv("INVARISET_THREADS");
  CHECK(strip_seconds(slurp(out1)) == strip_seconds(slurp(out2)));
}

TEST_CASE("bench reports are seeded and reproducible") {
  const auto rep_a = g_workdir / "bench_a.md";
  const auto rep_b = g_workdir / "bench_b.md";
  CHECK(run("bench --n 2 --count 3 --seed 11 --out " + rep_a.string()) == 0);
  CHECK(run("bench --n 2 --count 3 --seed 11 --out " + rep_b.string()) == 0);
  CHECK(slurp(rep_a) == slurp(rep_b));
  CHECK(slurp(rep_a).find("mean n_iter") != std::string::npos);

  const auto empty = g_workdir / "bench_empty.md";
  CHECK(run("bench --n 2 --count 0 --seed 1 --out " + empty.string()) == 0);
  CHECK(slurp(empty).find("n=2 count=0") != std::string::npos);
}

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: cli_tests <cli> <fixtures>\n");
    return 1;
  }
  g_cli = argv[1];
  g_fixtures = argv[2];
  g_workdir = std::filesystem::temp_directory_path() / "invariset_cli_tests";
  std::filesystem::create_directories(g_workdir);
  doctest::Context ctx;
  return ctx.run();
}
