#include "atomprune/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "atomprune/errors.hpp"
#include "atomprune/haar.hpp"
#include "atomprune/l0_oracle.hpp"
#include "atomprune/metrics.hpp"
#include "atomprune/sampling.hpp"
#include "atomprune/signals.hpp"

namespace atomprune {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<std::string> kKnownAlgorithms = {"gap", "gapcorr", "sl0", "iht", "l0oracle"};

void validate_algorithms(const std::vector<std::string>& algorithms) {
  if (algorithms.empty()) throw std::invalid_argument("experiment: no algorithms requested");
  for (const auto& name : algorithms) {
    bool known = false;
    for (const auto& k : kKnownAlgorithms) known = known || k == name;
    if (!known) throw std::invalid_argument("experiment: unknown algorithm '" + name + "'");
  }
}

/// Run the jobs [0, count) on up to `workers` threads. Jobs write to disjoint
/// slots, so the only shared state is the job counter.
void run_jobs(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& job) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t spawn = std::min(workers, count);
  pool.reserve(spawn);
  for (std::size_t i = 0; i < spawn; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct Instance {
  DenseMatrix a;
  DenseVector y;
  DenseVector x_true;
  std::size_t planted_k = 0;
};

DenseVector run_algorithm(const std::string& name, const Instance& inst, const DenseMatrix* c,
                          const SolverSuite& suite) {
  if (name == "gap") return gap_solve(inst.a, inst.y, suite.gap).x_hat;
  if (name == "gapcorr") {
    if (c) return gap_corr_solve(inst.a, inst.y, *c, suite.gapcorr).x_hat;
    return gap_corr_solve(inst.a, inst.y, DenseMatrix::identity(inst.a.cols()), suite.gapcorr)
        .x_hat;
  }
  if (name == "sl0") return sl0_solve(inst.a, inst.y, suite.sl0);
  if (name == "iht") {
    IhtConfig cfg = suite.iht;
    if (inst.planted_k > 0) cfg.k = inst.planted_k;
    return iht_solve(inst.a, inst.y, cfg);
  }
  if (name == "l0oracle") {
    const std::size_t k_max = inst.planted_k > 0 ? inst.planted_k : suite.oracle_k_max;
    return l0_oracle_solve(inst.a, inst.y, k_max).x_hat;
  }
  throw std::invalid_argument("run_algorithm: unknown algorithm '" + name + "'");
}

/// Solve, time, and score one (instance, algorithm) pair. Solver divergence
/// and infeasibility become failure records instead of crashing the sweep.
void score_algorithms(const Instance& inst, const DenseMatrix* c,
                      const std::vector<std::string>& algorithms, const SolverSuite& suite,
                      double threshold, std::size_t sweep, std::size_t trial,
                      TrialRecord* records, TimingRecord* timings) {
  for (std::size_t ai = 0; ai < algorithms.size(); ++ai) {
    TrialRecord rec;
    rec.sweep_index = sweep;
    rec.trial_index = trial;
    rec.algorithm = algorithms[ai];
    const auto start = std::chrono::steady_clock::now();
    try {
      const DenseVector x_hat = run_algorithm(algorithms[ai], inst, c, suite);
      rec.distortion = distortion(inst.x_true, x_hat);
      rec.success = rec.distortion <= threshold;
    } catch (const DivergenceError&) {
      rec.distortion = kInf;
      rec.diverged = true;
    } catch (const InfeasibleError&) {
      rec.distortion = kInf;
      rec.diverged = true;
    }
    const auto stop = std::chrono::steady_clock::now();
    records[ai] = std::move(rec);
    timings[ai] = TimingRecord{sweep, trial, algorithms[ai],
                               std::chrono::duration<double>(stop - start).count()};
  }
}

void fill_skipped(const std::vector<std::string>& algorithms, std::size_t sweep, std::size_t trial,
                  TrialRecord* records, TimingRecord* timings) {
  for (std::size_t ai = 0; ai < algorithms.size(); ++ai) {
    TrialRecord rec;
    rec.sweep_index = sweep;
    rec.trial_index = trial;
    rec.algorithm = algorithms[ai];
    rec.skipped = true;
    rec.success = true;  // a zero signal cannot fail; distortion is undefined
    records[ai] = std::move(rec);
    timings[ai] = TimingRecord{sweep, trial, algorithms[ai], 0.0};
  }
}

}  // namespace

std::uint64_t trial_stream_index(std::size_t sweep, std::size_t trial, std::size_t slot) {
  return (static_cast<std::uint64_t>(sweep) << 40) | (static_cast<std::uint64_t>(trial) << 8) |
         static_cast<std::uint64_t>(slot);
}

const TrialRecord& ExperimentTable::at(std::size_t sweep, std::size_t trial,
                                       std::size_t algo) const {
  return records[(sweep * trials + trial) * algorithms.size() + algo];
}

std::pair<double, std::size_t> ExperimentTable::aggregate(std::size_t sweep,
                                                          std::size_t algo) const {
  std::size_t diverged = 0;
  if (aggregate_kind == "failure_probability") {
    std::size_t failures = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      const TrialRecord& r = at(sweep, t, algo);
      if (!r.success) ++failures;
      if (r.diverged) ++diverged;
    }
    return {static_cast<double>(failures) / static_cast<double>(trials), diverged};
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const TrialRecord& r = at(sweep, t, algo);
    if (r.diverged) {
      ++diverged;
      continue;
    }
    if (r.skipped) continue;
    sum += r.distortion;
    ++count;
  }
  return {count == 0 ? kInf : sum / static_cast<double>(count), diverged};
}

ExperimentResult phase_transition(const PhaseConfig& cfg,
                                  const std::vector<std::string>& algorithms,
                                  const SolverSuite& suite, std::uint64_t master_seed,
                                  std::size_t workers) {
  validate_algorithms(algorithms);
  if (cfg.trials == 0) throw std::invalid_argument("phase_transition: trials must be positive");
  for (std::size_t k : cfg.k_values) {
    if (k > cfg.n) throw std::invalid_argument("phase_transition: k exceeds n");
  }

  ExperimentResult out;
  ExperimentTable& table = out.table;
  table.experiment = "phase";
  table.sweep_parameter = "k";
  table.aggregate_kind = "failure_probability";
  for (std::size_t k : cfg.k_values) table.sweep_values.push_back(static_cast<double>(k));
  table.algorithms = algorithms;
  table.trials = cfg.trials;
  table.master_seed = master_seed;
  table.config = {{"N", cfg.n}, {"M", cfg.m}, {"trials", cfg.trials}, {"threshold", cfg.threshold}};

  const std::size_t na = algorithms.size();
  table.records.resize(cfg.k_values.size() * cfg.trials * na);
  out.timings.resize(table.records.size());

  run_jobs(cfg.k_values.size() * cfg.trials, workers, [&](std::size_t job) {
    const std::size_t s = job / cfg.trials;
    const std::size_t t = job % cfg.trials;
    TrialRecord* records = table.records.data() + (s * cfg.trials + t) * na;
    TimingRecord* timings = out.timings.data() + (s * cfg.trials + t) * na;
    const std::size_t k = cfg.k_values[s];
    if (k == 0) {
      fill_skipped(algorithms, s, t, records, timings);
      return;
    }
    RngStream rng_a(master_seed, trial_stream_index(s, t, 0));
    RngStream rng_x(master_seed, trial_stream_index(s, t, 1));
    Instance inst;
    inst.a = gaussian_matrix_normalized(cfg.m, cfg.n, rng_a);
    SparseSignal sig = random_sparse_signal(cfg.n, k, rng_x);
    inst.x_true = std::move(sig.x);
    inst.y = matvec(inst.a, inst.x_true);
    inst.planted_k = k;
    score_algorithms(inst, nullptr, algorithms, suite, cfg.threshold, s, t, records, timings);
  });
  return out;
}

ExperimentResult stability_sweep(const StabilityConfig& cfg,
                                 const std::vector<std::string>& algorithms,
                                 const SolverSuite& suite, std::uint64_t master_seed,
                                 std::size_t workers) {
  validate_algorithms(algorithms);
  if (cfg.trials == 0) throw std::invalid_argument("stability_sweep: trials must be positive");
  if (cfg.k == 0 || cfg.k > cfg.n) throw std::invalid_argument("stability_sweep: bad sparsity");

  ExperimentResult out;
  ExperimentTable& table = out.table;
  table.experiment = "stability";
  table.sweep_parameter = "snr_db";
  table.aggregate_kind = "mean_distortion";
  table.sweep_values = cfg.snr_db_values;
  table.algorithms = algorithms;
  table.trials = cfg.trials;
  table.master_seed = master_seed;
  table.config = {{"N", cfg.n},
                  {"M", cfg.m},
                  {"k", cfg.k},
                  {"trials", cfg.trials},
                  {"threshold", cfg.threshold}};

  const std::size_t na = algorithms.size();
  table.records.resize(cfg.snr_db_values.size() * cfg.trials * na);
  out.timings.resize(table.records.size());

  run_jobs(cfg.snr_db_values.size() * cfg.trials, workers, [&](std::size_t job) {
    const std::size_t s = job / cfg.trials;
    const std::size_t t = job % cfg.trials;
    TrialRecord* records = table.records.data() + (s * cfg.trials + t) * na;
    TimingRecord* timings = out.timings.data() + (s * cfg.trials + t) * na;
    RngStream rng_a(master_seed, trial_stream_index(s, t, 0));
    RngStream rng_x(master_seed, trial_stream_index(s, t, 1));
    RngStream rng_w(master_seed, trial_stream_index(s, t, 2));
    Instance inst;
    inst.a = gaussian_matrix_normalized(cfg.m, cfg.n, rng_a);
    SparseSignal sig = random_sparse_signal(cfg.n, cfg.k, rng_x);
    inst.x_true = std::move(sig.x);
    const DenseVector clean = matvec(inst.a, inst.x_true);
    inst.y = add_noise_snr(clean, cfg.snr_db_values[s], rng_w);
    inst.planted_k = cfg.k;
    score_algorithms(inst, nullptr, algorithms, suite, cfg.threshold, s, t, records, timings);
  });
  return out;
}

ExperimentResult block_corr_experiment(const BlockCorrConfig& cfg,
                                       const std::vector<std::string>& algorithms,
                                       const SolverSuite& suite, std::uint64_t master_seed,
                                       std::size_t workers) {
  validate_algorithms(algorithms);
  if (cfg.trials == 0) throw std::invalid_argument("block_corr_experiment: trials must be positive");
  if (cfg.block_length == 0 || cfg.n % cfg.block_length != 0) {
    throw std::invalid_argument("block_corr_experiment: block length must divide n");
  }
  const std::size_t num_blocks = cfg.n / cfg.block_length;
  for (std::size_t active : cfg.active_values) {
    if (active > num_blocks) {
      throw std::invalid_argument("block_corr_experiment: active count exceeds block count");
    }
  }

  const DenseMatrix c_block = exponential_correlation(cfg.block_length, cfg.alpha);
  const DenseMatrix c_total = block_diagonal_correlation(c_block, num_blocks);

  ExperimentResult out;
  ExperimentTable& table = out.table;
  table.experiment = "blockcorr";
  table.sweep_parameter = "active_blocks";
  table.aggregate_kind = "mean_distortion";
  for (std::size_t v : cfg.active_values) table.sweep_values.push_back(static_cast<double>(v));
  table.algorithms = algorithms;
  table.trials = cfg.trials;
  table.master_seed = master_seed;
  table.config = {{"N", cfg.n},
                  {"M", cfg.m},
                  {"L", cfg.block_length},
                  {"alpha", cfg.alpha},
                  {"trials", cfg.trials},
                  {"threshold", cfg.threshold}};

  const std::size_t na = algorithms.size();
  table.records.resize(cfg.active_values.size() * cfg.trials * na);
  out.timings.resize(table.records.size());

  run_jobs(cfg.active_values.size() * cfg.trials, workers, [&](std::size_t job) {
    const std::size_t s = job / cfg.trials;
    const std::size_t t = job % cfg.trials;
    TrialRecord* records = table.records.data() + (s * cfg.trials + t) * na;
    TimingRecord* timings = out.timings.data() + (s * cfg.trials + t) * na;
    const std::size_t active = cfg.active_values[s];
    if (active == 0) {
      fill_skipped(algorithms, s, t, records, timings);
      return;
    }
    RngStream rng_a(master_seed, trial_stream_index(s, t, 0));
    RngStream rng_x(master_seed, trial_stream_index(s, t, 1));
    Instance inst;
    inst.a = gaussian_matrix_normalized(cfg.m, cfg.n, rng_a);
    BlockSparseSignal sig =
        correlated_block_sparse_signal(cfg.n, cfg.block_length, active, c_block, rng_x);
    inst.x_true = std::move(sig.x);
    inst.y = matvec(inst.a, inst.x_true);
    inst.planted_k = active * cfg.block_length;
    score_algorithms(inst, &c_total, algorithms, suite, cfg.threshold, s, t, records, timings);
  });
  return out;
}

WaveletResult wavelet_experiment(const WaveletConfig& cfg,
                                 const std::vector<std::string>& algorithms,
                                 const SolverSuite& suite, std::uint64_t master_seed) {
  validate_algorithms(algorithms);
  validate_haar_shape(cfg.n, cfg.levels);
  if (cfg.m == 0) throw std::invalid_argument("wavelet_experiment: m must be positive");

  WaveletResult out;
  ExperimentTable& table = out.table;
  table.experiment = "wavelet";
  table.sweep_parameter = "m";
  table.aggregate_kind = "mean_distortion";
  table.sweep_values = {static_cast<double>(cfg.m)};
  table.algorithms = algorithms;
  table.trials = 1;
  table.master_seed = master_seed;
  table.config = {{"N", cfg.n},
                  {"M", cfg.m},
                  {"levels", cfg.levels},
                  {"alpha", cfg.alpha},
                  {"threshold", cfg.threshold}};

  const DenseVector s = heavisine(cfg.n);
  const DenseVector x_true = haar_forward(s, cfg.levels);
  const DenseMatrix g = haar_analysis_matrix(cfg.n, cfg.levels);

  RngStream rng_phi(master_seed, trial_stream_index(0, 0, 0));
  const DenseMatrix phi = gaussian_matrix_normalized(cfg.m, cfg.n, rng_phi);
  // A = Phi * Psi with Psi = G^T
  const DenseMatrix a = matmul_abt(phi, g);
  const DenseVector y = matvec(phi, s);

  const DenseMatrix c_time = exponential_correlation(cfg.n, cfg.alpha);
  const DenseMatrix c_g = transform_correlation(g, c_time);

  Instance inst;
  inst.a = a;
  inst.y = y;
  inst.x_true = x_true;
  // HeaviSine is compressible rather than exactly sparse; give IHT a budget
  // of about a third of the measurements unless the caller pinned one.
  inst.planted_k = suite.iht.k > 1 ? suite.iht.k : std::max<std::size_t>(1, cfg.m / 3);

  out.original = s;
  table.records.resize(algorithms.size());
  out.timings.resize(algorithms.size());
  for (std::size_t ai = 0; ai < algorithms.size(); ++ai) {
    TrialRecord rec;
    rec.sweep_index = 0;
    rec.trial_index = 0;
    rec.algorithm = algorithms[ai];
    const auto start = std::chrono::steady_clock::now();
    try {
      const DenseVector x_hat = run_algorithm(algorithms[ai], inst, &c_g, suite);
      const DenseVector s_hat = haar_inverse(x_hat, cfg.levels);
      rec.distortion = distortion(s, s_hat);
      rec.success = rec.distortion <= cfg.threshold;
      out.reconstructions.emplace_back(algorithms[ai], s_hat);
    } catch (const DivergenceError&) {
      rec.distortion = kInf;
      rec.diverged = true;
    } catch (const InfeasibleError&) {
      rec.distortion = kInf;
      rec.diverged = true;
    }
    const auto stop = std::chrono::steady_clock::now();
    out.timings[ai] = TimingRecord{0, 0, algorithms[ai],
                                   std::chrono::duration<double>(stop - start).count()};
    table.records[ai] = std::move(rec);
  }
  return out;
}

}  // namespace atomprune
