#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "atomprune/dense.hpp"
#include "atomprune/gap.hpp"
#include "atomprune/gapcorr.hpp"
#include "atomprune/iht.hpp"
#include "atomprune/sl0.hpp"

namespace atomprune {

/// Solver parameter bundle shared by all experiment runners. The IHT sparsity
/// is overwritten per instance with the planted value.
struct SolverSuite {
  GapConfig gap;
  CorrGapConfig gapcorr;
  Sl0Config sl0;
  IhtConfig iht;
  std::size_t oracle_k_max = 3;
};

struct TrialRecord {
  std::size_t sweep_index = 0;
  std::size_t trial_index = 0;
  std::string algorithm;
  double distortion = 0.0;  // +inf when diverged
  bool success = false;
  bool skipped = false;
  bool diverged = false;
};

struct TimingRecord {
  std::size_t sweep_index = 0;
  std::size_t trial_index = 0;
  std::string algorithm;
  double seconds = 0.0;
};

/// Results of one experiment: metadata plus the full per-trial record grid,
/// laid out sweep-major, then trial, then algorithm. Aggregates are always
/// recomputed from the records, never stored.
struct ExperimentTable {
  std::string experiment;       // phase | stability | blockcorr | wavelet
  std::string sweep_parameter;  // k | snr_db | active_blocks | m
  std::string aggregate_kind;   // failure_probability | mean_distortion
  std::vector<double> sweep_values;
  std::vector<std::string> algorithms;
  std::size_t trials = 0;
  std::uint64_t master_seed = 0;
  nlohmann::ordered_json config;  // resolved experiment parameters
  std::vector<TrialRecord> records;

  const TrialRecord& at(std::size_t sweep, std::size_t trial, std::size_t algo) const;

  /// Aggregate per algorithm at one sweep point: failure probability or mean
  /// distortion over non-diverged, non-skipped trials (inf when none), plus
  /// the diverged count.
  std::pair<double, std::size_t> aggregate(std::size_t sweep, std::size_t algo) const;
};

struct ExperimentResult {
  ExperimentTable table;
  std::vector<TimingRecord> timings;  // deterministic order, nondeterministic values
};

struct PhaseConfig {
  std::size_t n = 500;
  std::size_t m = 250;
  std::vector<std::size_t> k_values = {10, 20, 30, 40, 50, 60, 70, 80, 90};
  std::size_t trials = 100;
  double threshold = 1e-3;
};

struct StabilityConfig {
  std::size_t n = 500;
  std::size_t m = 250;
  std::size_t k = 15;
  std::vector<double> snr_db_values = {5, 10, 15, 20, 25, 30, 35, 40};
  std::size_t trials = 100;
  double threshold = 1e-3;
};

struct BlockCorrConfig {
  std::size_t n = 500;
  std::size_t m = 250;
  std::size_t block_length = 10;
  std::vector<std::size_t> active_values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
  double alpha = 0.99;
  std::size_t trials = 100;
  double threshold = 1e-3;
};

struct WaveletConfig {
  std::size_t n = 1024;
  std::size_t m = 330;
  std::size_t levels = 3;
  double alpha = 0.99;
  double threshold = 1e-3;
};

/// Noiseless failure-probability sweep over sparsity levels. Every algorithm
/// inside one trial sees the identical (A, y, x_true); trial (s, t) draws
/// from streams derived only from (master_seed, s, t), so results are
/// independent of worker scheduling.
ExperimentResult phase_transition(const PhaseConfig& cfg,
                                  const std::vector<std::string>& algorithms,
                                  const SolverSuite& suite, std::uint64_t master_seed,
                                  std::size_t workers = 1);

/// Mean recovery distortion versus measurement SNR at a fixed sparsity.
ExperimentResult stability_sweep(const StabilityConfig& cfg,
                                 const std::vector<std::string>& algorithms,
                                 const SolverSuite& suite, std::uint64_t master_seed,
                                 std::size_t workers = 1);

/// Mean distortion versus number of active correlated blocks. The
/// correlation-aware solver receives the block-diagonal prior; everything
/// else sees only (A, y).
ExperimentResult block_corr_experiment(const BlockCorrConfig& cfg,
                                       const std::vector<std::string>& algorithms,
                                       const SolverSuite& suite, std::uint64_t master_seed,
                                       std::size_t workers = 1);

struct WaveletResult {
  ExperimentTable table;  // one row, time-domain distortion per algorithm
  std::vector<TimingRecord> timings;
  DenseVector original;
  std::vector<std::pair<std::string, DenseVector>> reconstructions;
};

/// Piecewise-smooth signal recovered through a multi-level Haar dictionary;
/// the correlation prior is conjugated into the transform domain. Distortion
/// is measured on the reconstructed time-domain signal.
WaveletResult wavelet_experiment(const WaveletConfig& cfg,
                                 const std::vector<std::string>& algorithms,
                                 const SolverSuite& suite, std::uint64_t master_seed);

/// Stream index packing shared by all runners: (sweep << 40) | (trial << 8) | slot.
std::uint64_t trial_stream_index(std::size_t sweep, std::size_t trial, std::size_t slot);

}  // namespace atomprune
