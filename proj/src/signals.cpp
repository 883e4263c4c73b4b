#include "atomprune/signals.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "atomprune/eig.hpp"

namespace atomprune {

namespace {

/// First k entries of a uniformly random permutation of 0..n-1, ascending.
std::vector<std::size_t> sample_distinct(std::size_t n, std::size_t k, RngStream& rng) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    // unbiased index in [i, n) via rejection on the top 64-bit range
    const std::uint64_t span = n - i;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t draw;
    do {
      draw = rng.next_u64();
    } while (draw >= limit);
    std::swap(pool[i], pool[i + draw % span]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

DenseMatrix exponential_correlation(std::size_t n, double alpha) {
  if (n == 0) throw std::invalid_argument("exponential_correlation: n must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("exponential_correlation: alpha must lie in (0, 1)");
  }
  if (alpha <= 0.5) {
    std::cerr << "atomprune: warning: correlation alpha=" << alpha
              << " is outside the intended range (0.5, 1)\n";
  }
  DenseMatrix c(n, n);
  // powers once, then fill by |i-j|
  std::vector<double> pow_alpha(n);
  pow_alpha[0] = 1.0;
  for (std::size_t d = 1; d < n; ++d) pow_alpha[d] = pow_alpha[d - 1] * alpha;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      c(i, j) = pow_alpha[i > j ? i - j : j - i];
    }
  }
  return c;
}

DenseMatrix block_diagonal_correlation(const DenseMatrix& c_block, std::size_t num_blocks) {
  if (c_block.rows() != c_block.cols()) {
    throw std::invalid_argument("block_diagonal_correlation: block not square");
  }
  if (num_blocks == 0) {
    throw std::invalid_argument("block_diagonal_correlation: need at least one block");
  }
  const std::size_t l = c_block.rows();
  DenseMatrix c(l * num_blocks, l * num_blocks);
  for (std::size_t b = 0; b < num_blocks; ++b) {
    const std::size_t off = b * l;
    for (std::size_t i = 0; i < l; ++i) {
      for (std::size_t j = 0; j < l; ++j) c(off + i, off + j) = c_block(i, j);
    }
  }
  return c;
}

SparseSignal random_sparse_signal(std::size_t n, std::size_t k, RngStream& rng) {
  if (n == 0) throw std::invalid_argument("random_sparse_signal: n must be positive");
  if (k > n) throw std::invalid_argument("random_sparse_signal: k exceeds n");
  SparseSignal out{DenseVector(n), sample_distinct(n, k, rng)};
  for (std::size_t idx : out.support) out.x[idx] = rng.next_gaussian();
  return out;
}

BlockSparseSignal correlated_block_sparse_signal(std::size_t n, std::size_t block_length,
                                                 std::size_t active, const DenseMatrix& c_block,
                                                 RngStream& rng) {
  if (n == 0 || block_length == 0 || n % block_length != 0) {
    throw std::invalid_argument("correlated_block_sparse_signal: block length must divide n");
  }
  const std::size_t num_blocks = n / block_length;
  if (active > num_blocks) {
    throw std::invalid_argument("correlated_block_sparse_signal: too many active blocks");
  }
  if (c_block.rows() != block_length || c_block.cols() != block_length) {
    throw std::invalid_argument("correlated_block_sparse_signal: block matrix shape mismatch");
  }

  const DenseMatrix f = correlation_factor(c_block);
  BlockSparseSignal out{DenseVector(n), sample_distinct(num_blocks, active, rng)};
  DenseVector w(std::max<std::size_t>(block_length, 1));
  for (std::size_t b : out.active_blocks) {
    for (std::size_t i = 0; i < block_length; ++i) w[i] = rng.next_gaussian();
    const std::size_t off = b * block_length;
    for (std::size_t i = 0; i < block_length; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < block_length; ++j) acc += f(i, j) * w[j];
      out.x[off + i] = acc;
    }
  }
  return out;
}

DenseVector heavisine(std::size_t n) {
  if (n < 2) throw std::invalid_argument("heavisine: need at least two samples");
  DenseVector s(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n);
    s[i] = 4.0 * std::sin(4.0 * std::numbers::pi * t) - sign(t - 0.3) - sign(0.72 - t);
  }
  return s;
}

DenseVector add_noise_snr(const DenseVector& y_clean, double snr_db, RngStream& rng) {
  if (std::isinf(snr_db) && snr_db > 0.0) return y_clean;
  const double energy = dot(y_clean, y_clean);
  if (energy == 0.0) {
    throw std::invalid_argument("add_noise_snr: SNR undefined for an all-zero signal");
  }
  const double m = static_cast<double>(y_clean.size());
  const double variance = energy / (m * std::pow(10.0, snr_db / 10.0));
  const double sigma = std::sqrt(variance);
  DenseVector y = y_clean;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += sigma * rng.next_gaussian();
  return y;
}

}  // namespace atomprune
