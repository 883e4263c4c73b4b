#pragma once

#include <cstddef>
#include <vector>

#include "atomprune/dense.hpp"

namespace atomprune {

struct L0OracleResult {
  DenseVector x_hat;
  std::vector<std::size_t> support;  // ascending
};

/// Exhaustive sparsest-solution search for desk-scale verification. Tries
/// supports of size 0..k_max in increasing size, least-squares fitting each;
/// returns the first size class containing a support whose residual is at
/// most 1e-8 ||y||, breaking ties by smaller residual then lexicographic
/// order. Throws BudgetError when C(n, k_max) exceeds 1e6 and
/// InfeasibleError when nothing fits.
L0OracleResult l0_oracle_solve(const DenseMatrix& a, const DenseVector& y, std::size_t k_max);

}  // namespace atomprune
