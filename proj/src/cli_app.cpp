#include "cli_app.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "atomprune/eig.hpp"
#include "atomprune/errors.hpp"
#include "atomprune/experiments.hpp"
#include "atomprune/haar.hpp"
#include "atomprune/l0_oracle.hpp"
#include "atomprune/metrics.hpp"
#include "atomprune/sampling.hpp"
#include "atomprune/signals.hpp"
#include "atomprune/table_io.hpp"
#include "atomprune/text_io.hpp"
#include "atomprune/version.hpp"

namespace atomprune::cli {

namespace {

using nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// configuration model

ordered_json solver_defaults() {
  ordered_json j;
  j["gap"] = {{"sigma2_max", 10.0},   {"sigma2_min", 1.0},    {"tau", 0.1},
              {"beta", 0.1},          {"max_inner", 2000},    {"mu_v2", 0.01},
              {"mu_v1_scale", 1e-4},  {"mu_d_scale", 1e-4},   {"gamma_floor", 1e-12}};
  j["gapcorr"] = {{"sigma2_max", 50.0}, {"sigma2_min", 0.9},  {"tau", 0.1},
                  {"beta", 0.1},        {"max_inner", 2000},  {"mu_v2", 0.01},
                  {"mu_v1", 1e-5},      {"mu_d_scale", 1e-2}, {"gamma_floor", 1e-12},
                  {"r_max", 1e6},       {"c_truncate", 1e-8}};
  j["sl0"] = {{"sigma_ratio", 0.5},
              {"inner_iterations", 3},
              {"mu", 2.0},
              {"sigma_min", 1e-4},
              {"sigma0", 0.0}};
  j["iht"] = {{"k", 1}, {"max_iterations", 1000}, {"step", 0.5}, {"tolerance", 1e-10}};
  j["oracle"] = {{"k_max", 3}};
  return j;
}

ordered_json default_config(const std::string& sub) {
  ordered_json j;
  j["subcommand"] = sub;
  j["version"] = kVersion;
  j["seed"] = 0;
  j["out"] = "";
  j["workers"] = 0;  // 0: use ATOMPRUNE_WORKERS, else 1
  if (sub == "phase") {
    j["algorithms"] = {"gap", "sl0", "iht"};
    j["experiment"] = {{"N", 500},
                       {"M", 250},
                       {"k_values", {10, 20, 30, 40, 50, 60, 70, 80, 90}},
                       {"trials", 100},
                       {"threshold", 1e-3}};
  } else if (sub == "stability") {
    j["algorithms"] = {"gap", "sl0", "iht"};
    j["experiment"] = {{"N", 500},
                       {"M", 250},
                       {"k_values", {15, 90}},
                       {"snr_db_values", {5, 10, 15, 20, 25, 30, 35, 40}},
                       {"noiseless", false},
                       {"trials", 100},
                       {"threshold", 1e-3}};
  } else if (sub == "blockcorr") {
    j["algorithms"] = {"gapcorr", "sl0", "iht"};
    j["experiment"] = {{"N", 500},
                       {"M", 250},
                       {"L", 10},
                       {"alpha", 0.99},
                       {"active_values", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15}},
                       {"trials", 100},
                       {"threshold", 1e-3}};
  } else if (sub == "wavelet") {
    j["algorithms"] = {"gapcorr", "sl0"};
    j["experiment"] = {
        {"N", 1024}, {"M", 330}, {"levels", 3}, {"alpha", 0.99}, {"threshold", 1e-3}};
  } else if (sub == "gen") {
    j["instance"] = {{"kind", "sparse"}, {"N", 60},       {"M", 30},     {"k", 3},
                     {"L", 10},          {"active", 3},   {"alpha", 0.99},
                     {"noiseless", true}, {"snr_db", 20.0}};
  } else if (sub == "solve") {
    j["solve"] = {{"algo", "gap"},  {"matrix", "A.txt"}, {"measurements", "y.txt"},
                  {"truth", ""},    {"correlation", ""}, {"k", 0},
                  {"k_max", 3}};
  }
  // selftest carries no extra sections
  const ordered_json solvers = solver_defaults();
  for (auto it = solvers.begin(); it != solvers.end(); ++it) j[it.key()] = it.value();
  return j;
}

/// Strict merge of `user` onto `base`: every user key must already exist in
/// the defaults, recursively. "version" is refreshed rather than trusted.
void merge_strict(ordered_json& base, const ordered_json& user, const std::string& prefix) {
  if (!user.is_object()) throw UsageError("config: expected an object at '" + prefix + "'");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!base.contains(it.key())) throw UsageError("config: unknown key '" + path + "'");
    ordered_json& slot = base[it.key()];
    if (slot.is_object()) {
      merge_strict(slot, it.value(), path);
    } else {
      slot = it.value();
    }
  }
}

/// Parse a --set value: comma lists become numeric arrays, then numbers,
/// booleans, null, and finally plain strings.
ordered_json parse_override_value(const std::string& text) {
  if (text.find(',') != std::string::npos) {
    ordered_json arr = ordered_json::array();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      try {
        arr.push_back(ordered_json::parse(item));
      } catch (const nlohmann::json::exception&) {
        arr.push_back(item);
      }
    }
    return arr;
  }
  if (text == "true") return true;
  if (text == "false") return false;
  if (text == "null") return nullptr;
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::exception&) {
    return text;
  }
}

void apply_override(ordered_json& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw UsageError("--set expects key=value, got '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const ordered_json value = parse_override_value(assignment.substr(eq + 1));

  ordered_json* slot = &cfg;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (!slot->contains(part)) throw UsageError("config: unknown key '" + key + "'");
    slot = &(*slot)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (slot->is_object()) throw UsageError("config: '" + key + "' is a section, not a value");
  if (slot->is_array() && !value.is_array()) {
    *slot = ordered_json::array({value});
  } else {
    *slot = value;
  }
}

// typed readers with sane errors -------------------------------------------

std::size_t get_count(const ordered_json& j, const std::string& key) {
  const auto& v = j.at(key);
  if (!v.is_number_unsigned() && !v.is_number_integer()) {
    throw UsageError("config: '" + key + "' must be a nonnegative integer");
  }
  const auto x = v.get<long long>();
  if (x < 0) throw UsageError("config: '" + key + "' must be nonnegative");
  return static_cast<std::size_t>(x);
}

double get_real(const ordered_json& j, const std::string& key) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw UsageError("config: '" + key + "' must be a number");
  return v.get<double>();
}

std::vector<std::size_t> get_counts(const ordered_json& j, const std::string& key) {
  const auto& v = j.at(key);
  if (!v.is_array()) throw UsageError("config: '" + key + "' must be an array");
  std::vector<std::size_t> out;
  for (const auto& e : v) {
    if (!e.is_number_integer() && !e.is_number_unsigned()) {
      throw UsageError("config: '" + key + "' must hold integers");
    }
    const auto x = e.get<long long>();
    if (x < 0) throw UsageError("config: '" + key + "' must hold nonnegative integers");
    out.push_back(static_cast<std::size_t>(x));
  }
  return out;
}

std::vector<double> get_reals(const ordered_json& j, const std::string& key) {
  const auto& v = j.at(key);
  if (!v.is_array()) throw UsageError("config: '" + key + "' must be an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw UsageError("config: '" + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

GapConfig gap_from_json(const ordered_json& j) {
  GapConfig c;
  c.sigma2_max = get_real(j, "sigma2_max");
  c.sigma2_min = get_real(j, "sigma2_min");
  c.tau = get_real(j, "tau");
  c.beta = get_real(j, "beta");
  c.max_inner = get_count(j, "max_inner");
  c.mu_v2 = get_real(j, "mu_v2");
  c.mu_v1_scale = get_real(j, "mu_v1_scale");
  c.mu_d_scale = get_real(j, "mu_d_scale");
  c.gamma_floor = get_real(j, "gamma_floor");
  return c;
}

CorrGapConfig gapcorr_from_json(const ordered_json& j) {
  CorrGapConfig c;
  c.sigma2_max = get_real(j, "sigma2_max");
  c.sigma2_min = get_real(j, "sigma2_min");
  c.tau = get_real(j, "tau");
  c.beta = get_real(j, "beta");
  c.max_inner = get_count(j, "max_inner");
  c.mu_v2 = get_real(j, "mu_v2");
  c.mu_v1 = get_real(j, "mu_v1");
  c.mu_d_scale = get_real(j, "mu_d_scale");
  c.gamma_floor = get_real(j, "gamma_floor");
  c.r_max = get_real(j, "r_max");
  c.c_truncate = get_real(j, "c_truncate");
  return c;
}

Sl0Config sl0_from_json(const ordered_json& j) {
  Sl0Config c;
  c.sigma_ratio = get_real(j, "sigma_ratio");
  c.inner_iterations = get_count(j, "inner_iterations");
  c.mu = get_real(j, "mu");
  c.sigma_min = get_real(j, "sigma_min");
  c.sigma0 = get_real(j, "sigma0");
  return c;
}

IhtConfig iht_from_json(const ordered_json& j) {
  IhtConfig c;
  c.k = std::max<std::size_t>(1, get_count(j, "k"));
  c.max_iterations = get_count(j, "max_iterations");
  c.step = get_real(j, "step");
  c.tolerance = get_real(j, "tolerance");
  return c;
}

SolverSuite suite_from_config(const ordered_json& cfg) {
  SolverSuite suite;
  suite.gap = gap_from_json(cfg.at("gap"));
  suite.gapcorr = gapcorr_from_json(cfg.at("gapcorr"));
  suite.sl0 = sl0_from_json(cfg.at("sl0"));
  suite.iht = iht_from_json(cfg.at("iht"));
  suite.oracle_k_max = get_count(cfg.at("oracle"), "k_max");
  return suite;
}

std::vector<std::string> algorithms_from_config(const ordered_json& cfg) {
  return cfg.at("algorithms").get<std::vector<std::string>>();
}

std::size_t resolve_workers(const ordered_json& cfg) {
  std::size_t workers = get_count(cfg, "workers");
  if (workers == 0) {
    if (const char* env = std::getenv("ATOMPRUNE_WORKERS")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v > 0) workers = static_cast<std::size_t>(v);
    }
  }
  return workers == 0 ? 1 : workers;
}

std::filesystem::path require_out_dir(ordered_json& cfg) {
  const std::string out = cfg.at("out").get<std::string>();
  if (out.empty()) throw UsageError("an output directory is required (--out or config 'out')");
  std::filesystem::path dir(out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out);
  return dir;
}

void write_manifest(const ordered_json& cfg, const std::filesystem::path& dir) {
  std::ofstream os(dir / "manifest.json");
  if (!os) throw IoError("cannot write manifest.json in " + dir.string());
  os << cfg.dump(2) << '\n';
}

void print_summary(const ordered_json& summary) { std::cout << summary.dump() << std::endl; }

// ---------------------------------------------------------------------------
// subcommand bodies

int cmd_phase(ordered_json& cfg) {
  const auto dir = require_out_dir(cfg);
  write_manifest(cfg, dir);
  const ordered_json& e = cfg.at("experiment");
  PhaseConfig pc;
  pc.n = get_count(e, "N");
  pc.m = get_count(e, "M");
  pc.k_values = get_counts(e, "k_values");
  pc.trials = get_count(e, "trials");
  pc.threshold = get_real(e, "threshold");
  const auto algorithms = algorithms_from_config(cfg);
  const SolverSuite suite = suite_from_config(cfg);
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
  const std::size_t workers = resolve_workers(cfg);

  std::cerr << "phase: N=" << pc.n << " M=" << pc.m << " trials=" << pc.trials
            << " workers=" << workers << "\n";
  ExperimentResult result = phase_transition(pc, algorithms, suite, seed, workers);
  const std::string csv = (dir / "phase.csv").string();
  write_table(result.table, csv);
  write_timings(result.timings, (dir / "timings.csv").string());

  ordered_json summary{{"experiment", "phase"},
                       {"csv", csv},
                       {"json", sidecar_path(csv)},
                       {"manifest", (dir / "manifest.json").string()}};
  print_summary(summary);
  return 0;
}

int cmd_stability(ordered_json& cfg) {
  const auto dir = require_out_dir(cfg);
  write_manifest(cfg, dir);
  const ordered_json& e = cfg.at("experiment");
  StabilityConfig base;
  base.n = get_count(e, "N");
  base.m = get_count(e, "M");
  base.trials = get_count(e, "trials");
  base.threshold = get_real(e, "threshold");
  base.snr_db_values = get_reals(e, "snr_db_values");
  if (e.at("noiseless").get<bool>()) {
    base.snr_db_values = {std::numeric_limits<double>::infinity()};
  }
  const auto k_values = get_counts(e, "k_values");
  const auto algorithms = algorithms_from_config(cfg);
  const SolverSuite suite = suite_from_config(cfg);
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
  const std::size_t workers = resolve_workers(cfg);

  ordered_json files = ordered_json::array();
  for (std::size_t k : k_values) {
    StabilityConfig sc = base;
    sc.k = k;
    std::cerr << "stability: N=" << sc.n << " M=" << sc.m << " k=" << k
              << " trials=" << sc.trials << " workers=" << workers << "\n";
    ExperimentResult result = stability_sweep(sc, algorithms, suite, seed, workers);
    const std::string csv = (dir / ("stability_k" + std::to_string(k) + ".csv")).string();
    write_table(result.table, csv);
    write_timings(result.timings,
                  (dir / ("timings_k" + std::to_string(k) + ".csv")).string());
    files.push_back({{"k", k}, {"csv", csv}, {"json", sidecar_path(csv)}});
  }
  print_summary(ordered_json{{"experiment", "stability"}, {"tables", files}});
  return 0;
}

int cmd_blockcorr(ordered_json& cfg) {
  const auto dir = require_out_dir(cfg);
  write_manifest(cfg, dir);
  const ordered_json& e = cfg.at("experiment");
  BlockCorrConfig bc;
  bc.n = get_count(e, "N");
  bc.m = get_count(e, "M");
  bc.block_length = get_count(e, "L");
  bc.alpha = get_real(e, "alpha");
  bc.active_values = get_counts(e, "active_values");
  bc.trials = get_count(e, "trials");
  bc.threshold = get_real(e, "threshold");
  const auto algorithms = algorithms_from_config(cfg);
  const SolverSuite suite = suite_from_config(cfg);
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
  const std::size_t workers = resolve_workers(cfg);

  std::cerr << "blockcorr: N=" << bc.n << " M=" << bc.m << " L=" << bc.block_length
            << " trials=" << bc.trials << " workers=" << workers << "\n";
  ExperimentResult result = block_corr_experiment(bc, algorithms, suite, seed, workers);
  const std::string csv = (dir / "blockcorr.csv").string();
  write_table(result.table, csv);
  write_timings(result.timings, (dir / "timings.csv").string());
  print_summary(ordered_json{{"experiment", "blockcorr"},
                             {"csv", csv},
                             {"json", sidecar_path(csv)}});
  return 0;
}

int cmd_wavelet(ordered_json& cfg) {
  const auto dir = require_out_dir(cfg);
  write_manifest(cfg, dir);
  const ordered_json& e = cfg.at("experiment");
  WaveletConfig wc;
  wc.n = get_count(e, "N");
  wc.m = get_count(e, "M");
  wc.levels = get_count(e, "levels");
  wc.alpha = get_real(e, "alpha");
  wc.threshold = get_real(e, "threshold");
  const auto algorithms = algorithms_from_config(cfg);
  const SolverSuite suite = suite_from_config(cfg);
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();

  std::cerr << "wavelet: N=" << wc.n << " M=" << wc.m << " levels=" << wc.levels << "\n";
  WaveletResult result = wavelet_experiment(wc, algorithms, suite, seed);
  const std::string csv = (dir / "wavelet.csv").string();
  write_table(result.table, csv);
  write_timings(result.timings, (dir / "timings.csv").string());
  write_vector_file((dir / "signal_original.txt").string(), result.original);
  ordered_json recon = ordered_json::object();
  for (const auto& [name, s_hat] : result.reconstructions) {
    const std::string path = (dir / ("signal_" + name + ".txt")).string();
    write_vector_file(path, s_hat);
    recon[name] = path;
  }
  ordered_json distortions = ordered_json::object();
  for (std::size_t a = 0; a < result.table.algorithms.size(); ++a) {
    const auto [value, diverged] = result.table.aggregate(0, a);
    distortions[result.table.algorithms[a]] =
        std::isinf(value) ? ordered_json("inf") : ordered_json(value);
  }
  print_summary(ordered_json{{"experiment", "wavelet"},
                             {"csv", csv},
                             {"distortion", distortions},
                             {"reconstructions", recon}});
  return 0;
}

int cmd_gen(ordered_json& cfg) {
  const auto dir = require_out_dir(cfg);
  write_manifest(cfg, dir);
  const ordered_json& inst = cfg.at("instance");
  const std::string kind = inst.at("kind").get<std::string>();
  const std::size_t n = get_count(inst, "N");
  const std::size_t m = get_count(inst, "M");
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();

  RngStream rng_a(seed, trial_stream_index(0, 0, 0));
  RngStream rng_x(seed, trial_stream_index(0, 0, 1));
  RngStream rng_w(seed, trial_stream_index(0, 0, 2));

  const DenseMatrix a = gaussian_matrix_normalized(m, n, rng_a);
  DenseVector x_true(n);
  if (kind == "sparse") {
    x_true = random_sparse_signal(n, get_count(inst, "k"), rng_x).x;
  } else if (kind == "block") {
    const std::size_t l = get_count(inst, "L");
    const DenseMatrix c_block = exponential_correlation(l, get_real(inst, "alpha"));
    x_true = correlated_block_sparse_signal(n, l, get_count(inst, "active"), c_block, rng_x).x;
    write_matrix_file((dir / "C_total.txt").string(),
                      block_diagonal_correlation(c_block, n / l));
  } else {
    throw UsageError("gen: unknown instance kind '" + kind + "' (sparse|block)");
  }
  DenseVector y = matvec(a, x_true);
  if (!inst.at("noiseless").get<bool>()) y = add_noise_snr(y, get_real(inst, "snr_db"), rng_w);

  write_matrix_file((dir / "A.txt").string(), a);
  write_vector_file((dir / "y.txt").string(), y);
  write_vector_file((dir / "x_true.txt").string(), x_true);
  print_summary(ordered_json{{"out", dir.string()},
                             {"files", {"A.txt", "y.txt", "x_true.txt"}},
                             {"kind", kind}});
  return 0;
}

int cmd_solve(ordered_json& cfg) {
  const auto dir = require_out_dir(cfg);
  write_manifest(cfg, dir);
  const ordered_json& s = cfg.at("solve");
  const std::string algo = s.at("algo").get<std::string>();
  const DenseMatrix a = read_matrix_file(s.at("matrix").get<std::string>());
  const DenseVector y = read_vector_file(s.at("measurements").get<std::string>());
  const SolverSuite suite = suite_from_config(cfg);

  std::optional<DenseVector> truth;
  if (const std::string path = s.at("truth").get<std::string>(); !path.empty()) {
    truth = read_vector_file(path);
  }

  DenseVector x_hat(a.cols());
  ordered_json summary{{"algorithm", algo}};
  if (algo == "gap") {
    GapSolution sol = gap_solve(a, y, suite.gap);
    x_hat = sol.x_hat;
    std::ofstream os(dir / "trace.csv");
    sol.trace.write_csv(os);
  } else if (algo == "gapcorr") {
    const std::string cpath = s.at("correlation").get<std::string>();
    if (cpath.empty()) throw UsageError("solve: gapcorr needs solve.correlation");
    GapSolution sol = gap_corr_solve(a, y, read_matrix_file(cpath), suite.gapcorr);
    x_hat = sol.x_hat;
    std::ofstream os(dir / "trace.csv");
    sol.trace.write_csv(os);
  } else if (algo == "sl0") {
    x_hat = sl0_solve(a, y, suite.sl0);
  } else if (algo == "iht") {
    IhtConfig ic = suite.iht;
    if (const std::size_t k = get_count(s, "k"); k > 0) ic.k = k;
    x_hat = iht_solve(a, y, ic);
  } else if (algo == "l0oracle") {
    L0OracleResult res = l0_oracle_solve(a, y, get_count(s, "k_max"));
    x_hat = res.x_hat;
    summary["support"] = res.support;
  } else {
    throw UsageError("solve: unknown algorithm '" + algo + "'");
  }

  write_vector_file((dir / "x_hat.txt").string(), x_hat);
  DenseVector r = matvec(a, x_hat);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = y[i] - r[i];
  summary["residual"] = norm2(r);
  if (truth) summary["distortion"] = distortion(*truth, x_hat);
  summary["x_hat"] = (dir / "x_hat.txt").string();
  print_summary(summary);
  return 0;
}

int cmd_selftest() {
  std::size_t failed = 0;
  const auto check = [&failed](const char* name, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
    if (!ok) ++failed;
  };

  {
    RngStream r1(42, 7), r2(42, 7);
    bool same = true;
    for (int i = 0; i < 1000; ++i) same = same && r1.next_u64() == r2.next_u64();
    check("rng determinism", same);
  }
  {
    RngStream rng(3, 0);
    const DenseMatrix a = gaussian_matrix_normalized(8, 13, rng);
    double worst = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < a.rows(); ++i) acc += a(i, j) * a(i, j);
      worst = std::max(worst, std::fabs(std::sqrt(acc) - 1.0));
    }
    check("measurement matrix column norms", worst <= 1e-12);
  }
  {
    const DenseMatrix c = exponential_correlation(16, 0.9);
    const EigDecomposition eig = symmetric_eig(c);
    DenseMatrix scaled = eig.eigenvectors;
    for (std::size_t j = 0; j < scaled.cols(); ++j) {
      for (std::size_t i = 0; i < scaled.rows(); ++i) scaled(i, j) *= eig.eigenvalues[j];
    }
    const DenseMatrix rec = matmul_abt(scaled, eig.eigenvectors);
    double worst = 0.0;
    for (std::size_t i = 0; i < c.rows(); ++i) {
      for (std::size_t j = 0; j < c.cols(); ++j) {
        worst = std::max(worst, std::fabs(rec(i, j) - c(i, j)));
      }
    }
    check("eigendecomposition reconstruction", worst <= 1e-8 * max_abs(c));
  }
  {
    bool ok = true;
    for (std::size_t n : {8u, 64u, 256u}) {
      const DenseMatrix g = haar_analysis_matrix(n, 3);
      const DenseMatrix ggt = matmul_abt(g, g);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          ok = ok && std::fabs(ggt(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-10;
        }
      }
    }
    check("haar orthonormality", ok);
  }
  {
    RngStream rng(11, 0);
    const DenseMatrix a = gaussian_matrix_normalized(12, 24, rng);
    const SparseSignal sig = random_sparse_signal(24, 2, rng);
    const DenseVector y = matvec(a, sig.x);
    GapConfig gc;
    const GapSolution s1 = gap_solve(a, y, gc);
    const GapSolution s2 = gap_solve(a, y, gc);
    check("gap determinism", s1.x_hat == s2.x_hat);
    bool gamma_ok = true;
    const GapSolution s3 = gap_solve(a, y, gc, [&](const GapState& st, std::size_t, std::size_t) {
      for (double g : st.gamma) gamma_ok = gamma_ok && g >= 0.0 && g <= 1.0;
    });
    check("gamma bounds during solve", gamma_ok && !s3.trace.rows.empty());
    const DenseVector zero_y(12);
    const GapSolution sz = gap_solve(a, zero_y, gc);
    check("zero measurements stay at zero", norm2(sz.x_hat) == 0.0);
  }
  {
    DenseMatrix m(3, 2);
    RngStream rng(5, 1);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 2; ++j) m(i, j) = rng.next_gaussian();
    }
    std::ostringstream os;
    write_matrix(os, m);
    std::istringstream is(os.str());
    check("matrix text round-trip", read_matrix(is) == m);
  }

  std::cout << (failed == 0 ? "selftest: all checks passed" : "selftest: FAILURES") << std::endl;
  return failed == 0 ? 0 : 2;
}

// ---------------------------------------------------------------------------

struct CommonFlags {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> workers;
  std::string algos;
};

void add_common_flags(CLI::App* sub, CommonFlags& flags) {
  sub->add_option("--config", flags.config_path, "JSON config file (strict keys)");
  sub->add_option("--set", flags.overrides, "override a config entry, e.g. gap.mu_v2=0.02")
      ->take_all();
  sub->add_option("--seed", flags.seed, "master seed");
  sub->add_option("--out", flags.out, "output directory");
  sub->add_option("--workers", flags.workers,
                  "worker threads (default: ATOMPRUNE_WORKERS or 1)");
  sub->add_option("--algo", flags.algos, "comma-separated algorithm list");
}

ordered_json resolve_config(const std::string& sub, const CommonFlags& flags) {
  ordered_json cfg = default_config(sub);
  if (!flags.config_path.empty()) {
    std::ifstream is(flags.config_path);
    if (!is) throw IoError("cannot open config: " + flags.config_path);
    ordered_json user;
    try {
      is >> user;
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("malformed config JSON: " + std::string(e.what()));
    }
    if (user.contains("subcommand") &&
        user["subcommand"].get<std::string>() != sub) {
      throw UsageError("config file is for subcommand '" +
                       user["subcommand"].get<std::string>() + "', not '" + sub + "'");
    }
    merge_strict(cfg, user, "");
  }
  for (const std::string& assignment : flags.overrides) apply_override(cfg, assignment);
  if (flags.seed) cfg["seed"] = *flags.seed;
  if (!flags.out.empty()) cfg["out"] = flags.out;
  if (flags.workers) cfg["workers"] = *flags.workers;
  if (!flags.algos.empty()) {
    std::vector<std::string> names;
    std::stringstream ss(flags.algos);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) names.push_back(item);
    }
    cfg["algorithms"] = names;
  }
  cfg["subcommand"] = sub;
  cfg["version"] = kVersion;
  return cfg;
}

std::string config_help(const std::string& sub) {
  return "Config keys and defaults (override with --set key=value):\n" +
         default_config(sub).dump(2) + "\n";
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"atomprune: annealed atom-pruning sparse recovery toolkit"};
  app.set_version_flag("--version", std::string("atomprune ") + kVersion);
  app.require_subcommand(1);

  struct SubSpec {
    const char* name;
    const char* description;
  };
  const std::vector<SubSpec> specs = {
      {"gen", "generate a problem instance (matrix, measurements, ground truth)"},
      {"solve", "run one solver on instance files"},
      {"phase", "failure probability versus sparsity level"},
      {"stability", "mean distortion versus measurement SNR"},
      {"blockcorr", "mean distortion versus active correlated blocks"},
      {"wavelet", "piecewise-smooth recovery through a Haar dictionary"},
      {"selftest", "run the built-in invariant checks"},
  };

  std::map<std::string, CommonFlags> flags;
  for (const auto& spec : specs) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.description);
    if (std::string(spec.name) != "selftest") {
      add_common_flags(sub, flags[spec.name]);
      sub->footer(config_help(spec.name));
    }
  }

  // CLI11's vector overload consumes the arguments back to front
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    if (sub == "selftest") return cmd_selftest();
    ordered_json cfg = resolve_config(sub, flags[sub]);
    if (sub == "phase") return cmd_phase(cfg);
    if (sub == "stability") return cmd_stability(cfg);
    if (sub == "blockcorr") return cmd_blockcorr(cfg);
    if (sub == "wavelet") return cmd_wavelet(cfg);
    if (sub == "gen") return cmd_gen(cfg);
    if (sub == "solve") return cmd_solve(cfg);
    throw UsageError("unknown subcommand '" + sub + "'");
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace atomprune::cli
