#pragma once

#include <cstddef>
#include <vector>

#include "atomprune/dense.hpp"
#include "atomprune/rng.hpp"

namespace atomprune {

struct SparseSignal {
  DenseVector x;
  std::vector<std::size_t> support;  // ascending
};

struct BlockSparseSignal {
  DenseVector x;
  std::vector<std::size_t> active_blocks;  // ascending
};

/// Correlation prior handed to the correlation-aware solver.
struct CorrelationModel {
  DenseMatrix c;
  double alpha = 0.0;
  std::size_t block_length = 0;
};

/// C[i][j] = alpha^|i-j|. Requires alpha in (0, 1); values at or below 0.5
/// are accepted with a warning on stderr since the intended operating range
/// is (0.5, 1).
DenseMatrix exponential_correlation(std::size_t n, double alpha);

/// Block-diagonal matrix with `num_blocks` copies of c_block on the diagonal.
DenseMatrix block_diagonal_correlation(const DenseMatrix& c_block, std::size_t num_blocks);

/// Exactly k nonzero entries at uniformly random distinct positions, values
/// i.i.d. standard normal (drawn in ascending support order).
SparseSignal random_sparse_signal(std::size_t n, std::size_t k, RngStream& rng);

/// Picks `active` distinct blocks uniformly, fills each with F * w where
/// F F^T = c_block and w is a fresh standard normal block. Blocks are filled
/// in ascending order.
BlockSparseSignal correlated_block_sparse_signal(std::size_t n, std::size_t block_length,
                                                 std::size_t active, const DenseMatrix& c_block,
                                                 RngStream& rng);

/// Piecewise-smooth sinusoid with two step discontinuities, sampled at
/// t_i = i/n: 4 sin(4 pi t) - sign(t - 0.3) - sign(0.72 - t).
DenseVector heavisine(std::size_t n);

/// Adds white Gaussian noise so that ||y||^2 / E||w||^2 equals the requested
/// SNR in dB (per-sample variance ||y||^2 / (M * 10^(snr/10))). A +infinity
/// snr_db returns the input unchanged.
DenseVector add_noise_snr(const DenseVector& y_clean, double snr_db, RngStream& rng);

}  // namespace atomprune
