#include "atomprune/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace atomprune {

DenseMatrix gaussian_matrix_normalized(std::size_t m, std::size_t n, RngStream& rng) {
  if (m == 0 || n == 0) {
    throw std::invalid_argument("gaussian_matrix_normalized: dimensions must be positive");
  }
  DenseMatrix a(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    double* row = a.row(i);
    for (std::size_t j = 0; j < n; ++j) row[j] = rng.next_gaussian();
  }
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += a(i, j) * a(i, j);
    const double norm = std::sqrt(acc);
    const double inv = 1.0 / norm;
    for (std::size_t i = 0; i < m; ++i) a(i, j) *= inv;
  }
  return a;
}

DenseVector gaussian_vector(std::size_t n, RngStream& rng) {
  if (n == 0) throw std::invalid_argument("gaussian_vector: length must be positive");
  DenseVector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = rng.next_gaussian();
  return v;
}

}  // namespace atomprune
