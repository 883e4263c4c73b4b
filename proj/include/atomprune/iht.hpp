#pragma once

#include <cstddef>

#include "atomprune/dense.hpp"

namespace atomprune {

/// Iterative hard thresholding: x <- H_k(x + mu A^T (y - Ax)), where H_k
/// keeps the k largest-magnitude entries (ties to the lower index).
struct IhtConfig {
  std::size_t k = 1;
  std::size_t max_iterations = 1000;
  // 0.5 keeps the gradient step contractive for unit-norm-column Gaussian A
  // at the undersampling ratios used here; a full step diverges once the
  // restricted operator norm passes 2.
  double step = 0.5;
  double tolerance = 1e-10;

  void validate() const;
};

/// Output is always at most k-sparse. Stops when the iterate change drops
/// below tolerance or at max_iterations; a diverging trajectory (non-finite
/// values) stops early and returns the last finite iterate.
DenseVector iht_solve(const DenseMatrix& a, const DenseVector& y, const IhtConfig& cfg);

}  // namespace atomprune
