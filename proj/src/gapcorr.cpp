#include "atomprune/gapcorr.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "atomprune/errors.hpp"

namespace atomprune {

namespace {

constexpr double kDivergenceGuard = 1e12;

double gamma_of(double x_d, double inv_two_sigma2) {
  const double d = x_d - 1.0;
  return std::exp(-(d * d) * inv_two_sigma2);
}

/// Row-compressed view of the correlation matrix with small entries dropped.
struct CompressedCorrelation {
  std::size_t n = 0;
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;
};

CompressedCorrelation compress_correlation(const DenseMatrix& c, double truncate) {
  CompressedCorrelation out;
  out.n = c.rows();
  out.offsets.assign(out.n + 1, 0);
  for (std::size_t i = 0; i < out.n; ++i) {
    const double* row = c.row(i);
    for (std::size_t j = 0; j < out.n; ++j) {
      if (std::fabs(row[j]) >= truncate) {
        out.cols.push_back(static_cast<std::uint32_t>(j));
        out.vals.push_back(row[j]);
      }
    }
    out.offsets[i + 1] = out.cols.size();
  }
  return out;
}

struct CorrWorkspace {
  DenseVector r;  // y - A x
  DenseVector u;  // A^T r
  DenseVector t;  // X_v^T sign(x)
  DenseVector w;  // reciprocal l1 weights
  double rnorm = 0.0;

  CorrWorkspace(std::size_t m, std::size_t n)
      : r(m), u(n), t(n), w(n) {}
};

void refresh_residual(const DenseMatrix& a, const DenseVector& y, const DenseVector& x,
                      CorrWorkspace& ws) {
  matvec(a, x, ws.r);
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ws.r[i] = y[i] - ws.r[i];
    acc += ws.r[i] * ws.r[i];
  }
  ws.rnorm = std::sqrt(acc);
}

/// gamma and the cached estimate from the current (x_d, sigma2, X_v).
void refresh_state(CorrGapState& st) {
  const double inv_two_sigma2 = 1.0 / (2.0 * st.sigma2);
  const std::size_t n = st.x_d.size();
  for (std::size_t j = 0; j < n; ++j) st.gamma[j] = gamma_of(st.x_d[j], inv_two_sigma2);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = st.x_v.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * st.gamma[j];
    st.x[i] = acc;
  }
}

/// One inner iteration. Expects ws.r/ws.rnorm consistent with the incoming
/// state; leaves them consistent with the updated state. Returns the largest
/// magnitude seen in (x_d, x) for the divergence guard.
double corr_step(CorrGapState& st, const CompressedCorrelation& c, const CorrGapConfig& cfg,
                 const DenseMatrix& a, const DenseVector& y, CorrWorkspace& ws) {
  const std::size_t n = st.x_d.size();
  const double sigma2 = st.sigma2;
  const double inv_sigma2 = 1.0 / sigma2;
  const double inv_two_sigma2 = 1.0 / (2.0 * sigma2);
  const double mu_d = sigma2 * cfg.mu_d_scale;

  matvec_transpose(a, ws.r, ws.u);

  const bool use_l1 = cfg.mu_v1 > 0.0;
  if (use_l1) {
    for (std::size_t j = 0; j < n; ++j) {
      ws.w[j] = std::min(1.0 / std::max(st.gamma[j], cfg.gamma_floor) - 1.0, cfg.r_max);
    }
  }

  // Value-matrix pass: accumulate X_v^T sign(x) from the incoming rows, then
  // apply both update terms to the row.
  for (std::size_t j = 0; j < n; ++j) ws.t[j] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double* row = st.x_v.row(i);
    const double sx = sign(st.x[i]);
    if (sx != 0.0) {
      for (std::size_t j = 0; j < n; ++j) ws.t[j] += sx * row[j];
    }
    const double au = cfg.mu_v2 * ws.u[i];
    for (std::size_t k = c.offsets[i]; k < c.offsets[i + 1]; ++k) {
      const std::size_t j = c.cols[k];
      row[j] += au * (c.vals[k] * st.gamma[j]);
    }
    if (use_l1 && sx != 0.0) {
      const double b = cfg.mu_v1 * sx;
      for (std::size_t j = 0; j < n; ++j) row[j] -= b * ws.w[j];
    }
  }

  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double dd = ((1.0 - st.x_d[j]) * inv_sigma2) * ws.t[j] * st.gamma[j];
    st.x_d[j] += mu_d * dd;
    worst = std::max(worst, std::fabs(st.x_d[j]));
  }
  for (std::size_t j = 0; j < n; ++j) st.gamma[j] = gamma_of(st.x_d[j], inv_two_sigma2);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = st.x_v.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * st.gamma[j];
    st.x[i] = acc;
    worst = std::max(worst, std::fabs(acc));
  }
  refresh_residual(a, y, st.x, ws);
  return worst;
}

void check_square_symmetric(const DenseMatrix& c, std::size_t n) {
  if (c.rows() != n || c.cols() != n) {
    throw std::invalid_argument("gap_corr: correlation matrix shape mismatch");
  }
  const double scale = std::max(1.0, max_abs(c));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::fabs(c(i, j) - c(j, i)) > 1e-8 * scale) {
        throw std::invalid_argument("gap_corr: correlation matrix not symmetric");
      }
    }
  }
}

}  // namespace

void CorrGapConfig::validate() const {
  GapConfig base;
  base.sigma2_max = sigma2_max;
  base.sigma2_min = sigma2_min;
  base.tau = tau;
  base.beta = beta;
  base.max_inner = max_inner;
  base.mu_v2 = mu_v2;
  base.mu_d_scale = mu_d_scale;
  base.gamma_floor = gamma_floor;
  base.validate();
  if (!(mu_v1 >= 0.0) || !std::isfinite(mu_v1)) {
    throw std::invalid_argument("CorrGapConfig: mu_v1 must be finite and nonnegative");
  }
  if (!(r_max > 0.0)) throw std::invalid_argument("CorrGapConfig: r_max must be positive");
  if (!(c_truncate >= 0.0)) throw std::invalid_argument("CorrGapConfig: c_truncate negative");
}

CorrGapState CorrGapState::initial(std::size_t n, double sigma2_max) {
  CorrGapState st{DenseMatrix(n, n), DenseVector(n, -1.0), DenseVector(n), DenseVector(n),
                  sigma2_max};
  refresh_state(st);
  return st;
}

DenseVector corr_grad_detector(const DenseMatrix& x_v, const DenseVector& x,
                               const DenseVector& x_d, const DenseVector& gamma, double sigma2) {
  const std::size_t n = x_d.size();
  if (x_v.rows() != n || x_v.cols() != n || x.size() != n || gamma.size() != n) {
    throw std::invalid_argument("corr_grad_detector: dimension mismatch");
  }
  if (!(sigma2 > 0.0)) throw std::invalid_argument("corr_grad_detector: sigma2 must be positive");
  const double inv_sigma2 = 1.0 / sigma2;
  DenseVector t(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double sx = sign(x[i]);
    if (sx == 0.0) continue;
    const double* row = x_v.row(i);
    for (std::size_t j = 0; j < n; ++j) t[j] += sx * row[j];
  }
  DenseVector out(n);
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = ((1.0 - x_d[j]) * inv_sigma2) * t[j] * gamma[j];
  }
  return out;
}

DenseMatrix corr_grad_l1(const DenseVector& x, const DenseVector& gamma, double gamma_floor,
                         double r_max) {
  const std::size_t n = x.size();
  if (gamma.size() != n) throw std::invalid_argument("corr_grad_l1: dimension mismatch");
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double sx = sign(x[i]);
    if (sx == 0.0) continue;
    double* row = out.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double w = std::min(1.0 / std::max(gamma[j], gamma_floor) - 1.0, r_max);
      row[j] = sx * w;
    }
  }
  return out;
}

DenseMatrix corr_grad_lsq(const DenseMatrix& a, const DenseVector& y, const DenseVector& x,
                          const DenseVector& gamma) {
  if (a.rows() != y.size() || a.cols() != x.size() || x.size() != gamma.size()) {
    throw std::invalid_argument("corr_grad_lsq: dimension mismatch");
  }
  DenseVector r = matvec(a, x);
  for (std::size_t i = 0; i < y.size(); ++i) r[i] = y[i] - r[i];
  const DenseVector u = matvec_transpose(a, r);
  const std::size_t n = x.size();
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double* row = out.row(i);
    const double nu = -u[i];
    for (std::size_t j = 0; j < n; ++j) row[j] = nu * gamma[j];
  }
  return out;
}

void corr_update(CorrGapState& state, const DenseMatrix& c, const CorrGapConfig& cfg,
                 const DenseMatrix& a, const DenseVector& y) {
  cfg.validate();
  const std::size_t n = state.x_d.size();
  check_square_symmetric(c, n);
  if (a.cols() != n || a.rows() != y.size()) {
    throw std::invalid_argument("corr_update: dimension mismatch");
  }
  const CompressedCorrelation cc = compress_correlation(c, cfg.c_truncate);
  CorrWorkspace ws(a.rows(), n);
  refresh_residual(a, y, state.x, ws);
  corr_step(state, cc, cfg, a, y, ws);
}

GapSolution gap_corr_solve(const DenseMatrix& a, const DenseVector& y, const DenseMatrix& c,
                           const CorrGapConfig& cfg, const CorrGapObserver& observer) {
  cfg.validate();
  if (a.rows() != y.size()) throw std::invalid_argument("gap_corr_solve: dimension mismatch");
  const std::size_t n = a.cols();
  check_square_symmetric(c, n);

  const CompressedCorrelation cc = compress_correlation(c, cfg.c_truncate);
  CorrGapState st = CorrGapState::initial(n, cfg.sigma2_max);
  CorrWorkspace ws(a.rows(), n);

  // same signal-relative residual thresholds as the uncorrelated solver
  const double y_norm = norm2(y);

  const std::size_t levels = annealing_level_count(cfg.sigma2_max, cfg.sigma2_min, cfg.tau);
  SolveTrace trace;
  trace.rows.reserve(levels);

  for (std::size_t level = 0; level < levels; ++level) {
    st.sigma2 = cfg.sigma2_max - static_cast<double>(level) * cfg.tau;
    refresh_state(st);
    refresh_residual(a, y, st.x, ws);
    const double threshold = cfg.beta * st.sigma2 * y_scale;

    std::size_t inner = 0;
    while (ws.rnorm > threshold && inner < cfg.max_inner) {
      const double worst = corr_step(st, cc, cfg, a, y, ws);
      if (!(worst < kDivergenceGuard) || !std::isfinite(ws.rnorm)) {
        throw DivergenceError("gap_corr_solve: state diverged at level " + std::to_string(level) +
                                  ", inner iteration " + std::to_string(inner),
                              level, inner);
      }
      ++inner;
      if (observer) observer(st, level, inner);
    }

    // the O(N^2) value matrix is scanned once per level, not per iteration
    for (double v : st.x_v.entries()) {
      if (!(std::fabs(v) < kDivergenceGuard)) {
        throw DivergenceError("gap_corr_solve: value matrix diverged at level " +
                                  std::to_string(level),
                              level, inner);
      }
    }

    std::size_t active = 0;
    double l1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (st.gamma[i] > 0.5) ++active;
      l1 += std::fabs(st.x[i]);
    }
    trace.rows.push_back(TraceRow{st.sigma2, inner, ws.rnorm, l1, active});
  }

  return GapSolution{st.x, std::move(trace)};
}

}  // namespace atomprune
