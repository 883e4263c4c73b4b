#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "atomprune/text_io.hpp"
#include "cli_app.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = 0;
  std::string out;
};

/// Run the CLI in process, capturing stdout.
CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream captured;
  std::streambuf* old = std::cout.rdbuf(captured.rdbuf());
  CliResult result;
  result.exit_code = atomprune::cli::run(args);
  std::cout.rdbuf(old);
  result.out = captured.str();
  return result;
}

fs::path fresh_dir(const char* tag) {
  auto dir = fs::temp_directory_path() / (std::string("atomprune_cli_") + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream is(path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("gen and solve round-trip on a small instance") {
  const auto dir = fresh_dir("gen");
  const CliResult gen = run_cli({"gen", "--out", dir.string(), "--seed", "777"});
  CHECK(gen.exit_code == 0);
  CHECK(fs::exists(dir / "A.txt"));
  CHECK(fs::exists(dir / "y.txt"));
  CHECK(fs::exists(dir / "x_true.txt"));
  CHECK(fs::exists(dir / "manifest.json"));

  const auto solve_dir = fresh_dir("solve");
  const CliResult solve = run_cli({"solve", "--out", solve_dir.string(), "--set",
                                   "solve.matrix=" + (dir / "A.txt").string(), "--set",
                                   "solve.measurements=" + (dir / "y.txt").string(), "--set",
                                   "solve.truth=" + (dir / "x_true.txt").string(), "--set",
                                   "solve.algo=gap"});
  CHECK(solve.exit_code == 0);
  CHECK(fs::exists(solve_dir / "x_hat.txt"));
  CHECK(fs::exists(solve_dir / "trace.csv"));

  const auto summary = nlohmann::json::parse(solve.out);
  CHECK(summary.at("algorithm") == "gap");
  CHECK(summary.at("distortion").get<double>() <= 1e-3);

  const std::string trace = slurp(solve_dir / "trace.csv");
  CHECK(trace.rfind("sigma2,inner_iters,residual,l1,active_atoms", 0) == 0);
}

TEST_CASE("oracle solve reports the support") {
  const auto dir = fresh_dir("gen_oracle");
  REQUIRE(run_cli({"gen", "--out", dir.string(), "--seed", "4", "--set", "instance.N=20",
                   "--set", "instance.M=10", "--set", "instance.k=2"})
              .exit_code == 0);
  const auto solve_dir = fresh_dir("solve_oracle");
  const CliResult solve = run_cli({"solve", "--out", solve_dir.string(), "--set",
                                   "solve.matrix=" + (dir / "A.txt").string(), "--set",
                                   "solve.measurements=" + (dir / "y.txt").string(), "--set",
                                   "solve.truth=" + (dir / "x_true.txt").string(), "--set",
                                   "solve.algo=l0oracle", "--set", "solve.k_max=2"});
  CHECK(solve.exit_code == 0);
  const auto summary = nlohmann::json::parse(solve.out);
  CHECK(summary.at("support").size() == 2);
  CHECK(summary.at("distortion").get<double>() <= 1e-10);
}

TEST_CASE("phase experiment is byte-identical across reruns and manifests") {
  const auto dir1 = fresh_dir("phase1");
  const std::vector<std::string> args = {
      "phase",       "--out",  dir1.string(),           "--seed", "7",
      "--algo",      "sl0,iht", "--set",                 "experiment.N=30",
      "--set",       "experiment.M=15",                  "--set",  "experiment.k_values=2,6",
      "--set",       "experiment.trials=3",              "--workers", "2"};
  CHECK(run_cli(args).exit_code == 0);

  auto args2 = args;
  const auto dir2 = fresh_dir("phase2");
  args2[2] = dir2.string();
  CHECK(run_cli(args2).exit_code == 0);
  CHECK(slurp(dir1 / "phase.csv") == slurp(dir2 / "phase.csv"));
  CHECK(slurp(dir1 / "phase.json") == slurp(dir2 / "phase.json"));

  // reproduce from the manifest alone (different out dir, one worker)
  const auto dir3 = fresh_dir("phase3");
  const CliResult redo = run_cli({"phase", "--config", (dir1 / "manifest.json").string(),
                                  "--out", dir3.string(), "--workers", "1"});
  CHECK(redo.exit_code == 0);
  CHECK(slurp(dir1 / "phase.csv") == slurp(dir3 / "phase.csv"));
  CHECK(slurp(dir1 / "phase.json") == slurp(dir3 / "phase.json"));
}

TEST_CASE("strict config rejects unknown keys") {
  const auto dir = fresh_dir("strict");
  CHECK(run_cli({"phase", "--out", dir.string(), "--set", "experiment.bogus=1"}).exit_code == 1);

  const auto cfg_path = dir / "bad.json";
  std::ofstream(cfg_path) << "{\"expriment\": {\"N\": 10}}";
  CHECK(run_cli({"phase", "--out", dir.string(), "--config", cfg_path.string()}).exit_code == 1);

  std::ofstream(dir / "wrongsub.json") << "{\"subcommand\": \"stability\"}";
  CHECK(run_cli({"phase", "--out", dir.string(), "--config", (dir / "wrongsub.json").string()})
            .exit_code == 1);
}

TEST_CASE("missing input files give an io error exit code") {
  const auto dir = fresh_dir("missing");
  const CliResult r = run_cli({"solve", "--out", dir.string(), "--set",
                               "solve.matrix=/nonexistent/A.txt", "--set",
                               "solve.measurements=/nonexistent/y.txt"});
  CHECK(r.exit_code == 2);
}

TEST_CASE("usage errors and help") {
  CHECK(run_cli({}).exit_code == 1);  // missing subcommand
  CHECK(run_cli({"--help"}).exit_code == 0);
  CHECK(run_cli({"phase", "--help"}).exit_code == 0);
  CHECK(run_cli({"bogus"}).exit_code == 1);
}

TEST_CASE("selftest passes") {
  const CliResult r = run_cli({"selftest"});
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
}
