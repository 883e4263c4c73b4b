#include "atomprune/iht.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace atomprune {

void IhtConfig::validate() const {
  if (k == 0) throw std::invalid_argument("IhtConfig: k must be positive");
  if (max_iterations == 0) throw std::invalid_argument("IhtConfig: max_iterations must be positive");
  if (!(step > 0.0)) throw std::invalid_argument("IhtConfig: step must be positive");
  if (!(tolerance >= 0.0)) throw std::invalid_argument("IhtConfig: tolerance negative");
}

namespace {

/// Zero out all but the k largest-magnitude entries; ties keep lower indices.
void hard_threshold(DenseVector& x, std::size_t k, std::vector<std::size_t>& idx) {
  const std::size_t n = x.size();
  if (k >= n) return;
  idx.resize(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::nth_element(idx.begin(), idx.begin() + k, idx.end(), [&x](std::size_t i, std::size_t j) {
    const double ai = std::fabs(x[i]);
    const double aj = std::fabs(x[j]);
    if (ai != aj) return ai > aj;
    return i < j;
  });
  for (std::size_t p = k; p < n; ++p) x[idx[p]] = 0.0;
}

bool all_finite(const DenseVector& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

DenseVector iht_solve(const DenseMatrix& a, const DenseVector& y, const IhtConfig& cfg) {
  cfg.validate();
  if (a.rows() != y.size()) throw std::invalid_argument("iht_solve: dimension mismatch");
  if (cfg.k > a.cols()) throw std::invalid_argument("iht_solve: k exceeds signal length");
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();

  DenseVector x(n);
  DenseVector next(n);
  DenseVector r(m);
  DenseVector g(n);
  std::vector<std::size_t> idx;

  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    matvec(a, x, r);
    for (std::size_t i = 0; i < m; ++i) r[i] = y[i] - r[i];
    matvec_transpose(a, r, g);
    for (std::size_t j = 0; j < n; ++j) next[j] = x[j] + cfg.step * g[j];
    hard_threshold(next, cfg.k, idx);

    if (!all_finite(next)) return x;  // diverged; keep the last finite iterate

    double change = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = next[j] - x[j];
      change += d * d;
    }
    x = next;
    if (std::sqrt(change) < cfg.tolerance) break;
  }
  return x;
}

}  // namespace atomprune
