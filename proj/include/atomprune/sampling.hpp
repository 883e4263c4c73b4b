#pragma once

#include "atomprune/dense.hpp"
#include "atomprune/rng.hpp"

namespace atomprune {

/// M x N matrix of i.i.d. standard normal entries (drawn row-major), with
/// every column rescaled to unit l2 norm.
DenseMatrix gaussian_matrix_normalized(std::size_t m, std::size_t n, RngStream& rng);

/// Vector of n i.i.d. standard normal entries.
DenseVector gaussian_vector(std::size_t n, RngStream& rng);

}  // namespace atomprune
