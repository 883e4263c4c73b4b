#pragma once

#include <cstddef>
#include <vector>

#include "atomprune/dense.hpp"

namespace atomprune {

/// Cholesky factorization of a symmetric positive definite matrix.
/// Throws std::invalid_argument when a pivot falls below the rank tolerance.
class CholeskySolver {
 public:
  explicit CholeskySolver(const DenseMatrix& spd);

  std::size_t size() const noexcept { return n_; }

  DenseVector solve(const DenseVector& rhs) const;
  void solve_inplace(DenseVector& rhs) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> l_;  // lower triangle, row-major n x n
};

}  // namespace atomprune
