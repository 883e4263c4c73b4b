#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "atomprune/dense.hpp"

namespace atomprune {

/// Annealing and step-size parameters of the atom-pruning solver. Defaults
/// are the reference parameter set for uncorrelated recovery:
/// mu_v1 = sigma^2/(1e4*gamma) realized as mu_v1_scale = 1e-4 (the gamma
/// factor cancels against the l1 gradient), mu_d = sigma^2 * 1e-4.
struct GapConfig {
  double sigma2_max = 10.0;
  double sigma2_min = 1.0;
  double tau = 0.1;   // annealing step
  double beta = 0.1;  // residual exit factor, in units of ||y||: a level ends
                      // when ||Ax-y|| <= beta * sigma^2 * ||y|| / sigma2_max
  std::size_t max_inner = 2000;
  double mu_v2 = 0.01;        // least-squares step
  double mu_v1_scale = 1e-4;  // l1 step = sigma^2 * mu_v1_scale
  double mu_d_scale = 1e-4;   // detector step = sigma^2 * mu_d_scale
  double gamma_floor = 1e-12;

  void validate() const;
};

struct GapState {
  DenseVector x_v;    // values
  DenseVector x_d;    // detectors
  DenseVector gamma;  // exp(-(x_d-1)^2 / (2 sigma^2)), cached
  double sigma2 = 0.0;
};

struct TraceRow {
  double sigma2 = 0.0;
  std::size_t inner_iters = 0;
  double residual = 0.0;  // ||A x_hat - y||_2 at the end of the level
  double l1_norm = 0.0;   // ||x_hat||_1
  std::size_t active_atoms = 0;  // count of gamma_i > 0.5
};

struct SolveTrace {
  std::vector<TraceRow> rows;

  static const char* csv_header();  // "sigma2,inner_iters,residual,l1,active_atoms"
  void write_csv(std::ostream& os) const;
};

struct GapSolution {
  DenseVector x_hat;
  SolveTrace trace;
};

/// Fired after every inner iteration with the post-update state. Used by the
/// test suites to watch trajectories; null costs nothing.
using GapObserver =
    std::function<void(const GapState& state, std::size_t level, std::size_t inner)>;

/// gamma_i = exp(-(x_d_i - 1)^2 / (2 sigma2)), each in [0, 1]. Underflows to
/// exactly 0 for far-away detectors, never NaN.
DenseVector gamma_weights(const DenseVector& x_d, double sigma2);

/// Gradient of ||x||_1 in the detector variables:
/// delta_d_i = -((x_d_i - 1)/sigma2) * |x_v_i| * gamma_i.
DenseVector grad_detector(const DenseVector& x_v, const DenseVector& x_d,
                          const DenseVector& gamma, double sigma2);

/// Combined step mu_v1 (.) grad_||x||_1 w.r.t. x_v in closed form:
/// (sigma2 * mu_v1_scale) * sign(x_v). The per-element step mu_v1 =
/// sigma2*mu_v1_scale/gamma cancels the gamma factor of the raw gradient
/// sign(x_v)(.)gamma, and extends it continuously where gamma underflows.
DenseVector grad_l1_effective(const DenseVector& x_v, double sigma2, double mu_v1_scale);

/// Gradient of ||y - Ax||_2^2 in the value variables, x = x_v (.) gamma:
/// -2 A^T (y - Ax) (.) gamma.
DenseVector grad_lsq(const DenseMatrix& a, const DenseVector& y, const DenseVector& x_v,
                     const DenseVector& gamma);

/// Annealed two-loop solve. Starts from x_v = 0, x_d = -1; for each sigma^2
/// level runs inner gradient iterations until the residual drops below the
/// level's exit threshold (beta * sigma^2 * ||y|| / sigma2_max) or max_inner
/// is hit, then decreases sigma^2 by tau. All gradients are evaluated at the
/// previous iterate. Deterministic; throws DivergenceError if the state
/// leaves the finite range.
GapSolution gap_solve(const DenseMatrix& a, const DenseVector& y, const GapConfig& cfg = {},
                      const GapObserver& observer = nullptr);

/// Number of annealing levels: ceil((sigma2_max - sigma2_min)/tau), with a
/// small guard against floating-point wobble on exact multiples.
std::size_t annealing_level_count(double sigma2_max, double sigma2_min, double tau);

}  // namespace atomprune
