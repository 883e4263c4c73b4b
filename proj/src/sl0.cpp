#include "atomprune/sl0.hpp"

#include <cmath>
#include <stdexcept>

#include "atomprune/solve.hpp"

namespace atomprune {

void Sl0Config::validate() const {
  if (!(sigma_ratio > 0.0 && sigma_ratio < 1.0)) {
    throw std::invalid_argument("Sl0Config: sigma_ratio must lie in (0, 1)");
  }
  if (inner_iterations == 0) {
    throw std::invalid_argument("Sl0Config: need at least one inner iteration");
  }
  if (!(mu > 0.0)) throw std::invalid_argument("Sl0Config: mu must be positive");
  if (!(sigma_min > 0.0)) throw std::invalid_argument("Sl0Config: sigma_min must be positive");
}

DenseVector sl0_solve(const DenseMatrix& a, const DenseVector& y, const Sl0Config& cfg) {
  cfg.validate();
  if (a.rows() != y.size()) throw std::invalid_argument("sl0_solve: dimension mismatch");
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();

  // Gram factor for the pseudo-inverse A^T (A A^T)^{-1}; failure here means a
  // rank-deficient measurement matrix.
  const DenseMatrix gram = matmul_abt(a, a);
  CholeskySolver chol = [&]() {
    try {
      return CholeskySolver(gram);
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("sl0_solve: measurement matrix is rank deficient");
    }
  }();

  const auto project = [&](DenseVector& x) {
    // x <- x - A^+ (A x - y)
    DenseVector ax(m);
    matvec(a, x, ax);
    for (std::size_t i = 0; i < m; ++i) ax[i] -= y[i];
    chol.solve_inplace(ax);
    for (std::size_t i = 0; i < m; ++i) {
      const double ci = ax[i];
      if (ci == 0.0) continue;
      const double* row = a.row(i);
      for (std::size_t j = 0; j < n; ++j) x[j] -= row[j] * ci;
    }
  };

  // minimum-norm start
  DenseVector x(n);
  project(x);

  double sigma = cfg.sigma0;
  if (sigma <= 0.0) sigma = 2.0 * norm_inf(x);
  if (sigma == 0.0) return x;  // y was zero

  for (; sigma > cfg.sigma_min; sigma *= cfg.sigma_ratio) {
    const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
    for (std::size_t it = 0; it < cfg.inner_iterations; ++it) {
      for (std::size_t j = 0; j < n; ++j) {
        x[j] -= cfg.mu * (x[j] * std::exp(-(x[j] * x[j]) * inv_two_sigma2));
      }
      project(x);
    }
  }
  return x;
}

}  // namespace atomprune
