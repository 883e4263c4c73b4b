#pragma once

#include <cstddef>

#include "atomprune/dense.hpp"

namespace atomprune {

/// Smoothed-l0 baseline: per-sigma steepest ascent on the Gaussian surrogate
/// sum_i exp(-x_i^2/(2 sigma^2)), each step followed by an exact projection
/// onto {x : Ax = y} through the precomputed pseudo-inverse. The sigma
/// schedule is geometric, starting from sigma0 (auto: 2 max|A^+ y|) down to
/// sigma_min.
struct Sl0Config {
  double sigma_ratio = 0.5;
  std::size_t inner_iterations = 3;
  double mu = 2.0;
  double sigma_min = 1e-4;
  double sigma0 = 0.0;  // <= 0 means auto

  void validate() const;
};

/// Requires A with full row rank. The output is always feasible:
/// ||A x - y|| <= 1e-8 ||y|| by construction.
DenseVector sl0_solve(const DenseMatrix& a, const DenseVector& y, const Sl0Config& cfg = {});

}  // namespace atomprune
