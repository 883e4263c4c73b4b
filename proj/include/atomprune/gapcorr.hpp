#pragma once

#include <cstddef>
#include <functional>

#include "atomprune/dense.hpp"
#include "atomprune/gap.hpp"

namespace atomprune {

/// Parameters of the correlation-aware solver. Defaults are the reference
/// set for correlated block recovery: mu_v1 = 1e-5 (constant), mu_v2 = 0.01,
/// mu_d = sigma^2/100, annealing 50 -> 0.9 by 0.1.
struct CorrGapConfig {
  double sigma2_max = 50.0;
  double sigma2_min = 0.9;
  double tau = 0.1;
  double beta = 0.1;
  std::size_t max_inner = 2000;
  double mu_v2 = 0.01;
  double mu_v1 = 1e-5;       // constant l1 step on the value matrix
  double mu_d_scale = 1e-2;  // detector step = sigma^2 * mu_d_scale
  double gamma_floor = 1e-12;
  double r_max = 1e6;        // cap on the reciprocal weight (1/gamma - 1)
  double c_truncate = 1e-8;  // correlation entries below this drop out of the update

  void validate() const;
};

/// Matrix-valued solver state; x caches the current estimate X_v * gamma.
struct CorrGapState {
  DenseMatrix x_v;    // N x N values
  DenseVector x_d;    // detectors
  DenseVector gamma;
  DenseVector x;      // X_v * gamma
  double sigma2 = 0.0;

  static CorrGapState initial(std::size_t n, double sigma2_max);
};

using CorrGapObserver =
    std::function<void(const CorrGapState& state, std::size_t level, std::size_t inner)>;

/// Gradient of ||X_v gamma||_1 in the detectors:
/// delta_d = -(X_v^T sign(x)) (.) ((x_d - 1)/sigma2) (.) gamma.
DenseVector corr_grad_detector(const DenseMatrix& x_v, const DenseVector& x,
                               const DenseVector& x_d, const DenseVector& gamma, double sigma2);

/// l1 gradient in the value matrix with the reciprocal reweighting:
/// sign(x) * w^T, w_i = min(1/max(gamma_i, gamma_floor) - 1, r_max).
DenseMatrix corr_grad_l1(const DenseVector& x, const DenseVector& gamma,
                         double gamma_floor = 1e-12, double r_max = 1e6);

/// Least-squares gradient in the value matrix: -(A^T(y - Ax)) * gamma^T.
/// Note the printed form carries no factor 2; it equals half the true
/// gradient of ||y - Ax||_2^2.
DenseMatrix corr_grad_lsq(const DenseMatrix& a, const DenseVector& y, const DenseVector& x,
                          const DenseVector& gamma);

/// One inner iteration in place:
///   X_v <- X_v - mu_v2 (C (.) delta_v2) - mu_v1 delta_v1
///   x_d <- x_d + mu_d delta_d          (mu_d = sigma^2 * mu_d_scale)
/// then gamma and the cached estimate are recomputed. All gradients are
/// evaluated at the incoming state. Correlation entries below cfg.c_truncate
/// are treated as exact zeros.
void corr_update(CorrGapState& state, const DenseMatrix& c, const CorrGapConfig& cfg,
                 const DenseMatrix& a, const DenseVector& y);

/// Annealed two-loop solve with matrix values, mirroring gap_solve. C must be
/// square and symmetric (transform-domain correlations need not have a unit
/// diagonal). Returns x_hat = X_v * gamma at termination.
GapSolution gap_corr_solve(const DenseMatrix& a, const DenseVector& y, const DenseMatrix& c,
                           const CorrGapConfig& cfg = {},
                           const CorrGapObserver& observer = nullptr);

}  // namespace atomprune
