#include <cmath>
#include <vector>

#include <doctest.h>

#include "atomprune/dense.hpp"
#include "atomprune/errors.hpp"
#include "atomprune/gap.hpp"
#include "atomprune/gapcorr.hpp"
#include "atomprune/metrics.hpp"
#include "atomprune/rng.hpp"
#include "atomprune/sampling.hpp"
#include "atomprune/signals.hpp"
#include "oracles.hpp"

using namespace atomprune;
using atomprune::testing::central_diff;
using atomprune::testing::rel_error;

namespace {

CorrGapState make_state(const DenseMatrix& x_v, const DenseVector& x_d, double sigma2) {
  CorrGapState st = CorrGapState::initial(x_d.size(), sigma2);
  st.x_v = x_v;
  st.x_d = x_d;
  st.gamma = gamma_weights(x_d, sigma2);
  for (std::size_t i = 0; i < x_d.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < x_d.size(); ++j) acc += x_v(i, j) * st.gamma[j];
    st.x[i] = acc;
  }
  return st;
}

}  // namespace

TEST_CASE("corr_grad_detector zero cases and diagonal reduction") {
  const std::size_t n = 5;
  RngStream rng(1, 0);
  DenseVector x_d(n), gamma(n);
  for (std::size_t i = 0; i < n; ++i) x_d[i] = -1.0 + 2.0 * rng.next_uniform();
  const double sigma2 = 3.0;
  gamma = gamma_weights(x_d, sigma2);

  const DenseVector zero = corr_grad_detector(DenseMatrix(n, n), DenseVector(n), x_d, gamma, sigma2);
  for (double v : zero) CHECK(v == 0.0);

  // diagonal X_v reduces to the uncorrelated formula
  DenseMatrix diag(n, n);
  DenseVector x_v(n), x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x_v[i] = rng.next_gaussian();
    diag(i, i) = x_v[i];
    x[i] = x_v[i] * gamma[i];
  }
  const DenseVector corr = corr_grad_detector(diag, x, x_d, gamma, sigma2);
  const DenseVector uncorr = grad_detector(x_v, x_d, gamma, sigma2);
  for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(corr[i] - uncorr[i]) <= 1e-12);
}

TEST_CASE("corr_grad_detector matches finite differences") {
  const std::size_t n = 5;
  RngStream rng(2, 0);
  DenseMatrix x_v(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) x_v(i, j) = rng.next_gaussian();
  }
  DenseVector x_d(n);
  for (std::size_t i = 0; i < n; ++i) x_d[i] = -1.0 + 2.0 * rng.next_uniform();
  const double sigma2 = 2.0;
  const DenseVector gamma = gamma_weights(x_d, sigma2);
  DenseVector x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += x_v(i, j) * gamma[j];
    x[i] = acc;
  }
  // keep away from kinks of |x_i|
  bool near_kink = false;
  for (double v : x) near_kink = near_kink || std::fabs(v) < 0.05;
  if (!near_kink) {
    const DenseVector grad = corr_grad_detector(x_v, x, x_d, gamma, sigma2);
    const auto l1_of_xd = [&](const DenseVector& xd_probe) {
      const DenseVector g = gamma_weights(xd_probe, sigma2);
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double xi = 0.0;
        for (std::size_t j = 0; j < n; ++j) xi += x_v(i, j) * g[j];
        acc += std::fabs(xi);
      }
      return acc;
    };
    for (std::size_t i = 0; i < n; ++i) {
      const double fd = central_diff(l1_of_xd, x_d, i);
      if (std::fabs(fd) > 1e-8) CHECK(rel_error(grad[i], fd) <= 1e-4);
    }
  }
}

TEST_CASE("corr_grad_l1 reciprocal weights") {
  DenseVector x(3);
  x[0] = 2.0;
  x[1] = -1.0;
  x[2] = 0.0;

  DenseVector ones(3, 1.0);
  const DenseMatrix zero = corr_grad_l1(x, ones);
  for (double v : zero.entries()) CHECK(v == 0.0);

  DenseVector gamma(3, 0.5);
  const DenseMatrix g = corr_grad_l1(x, gamma);
  CHECK(g(0, 0) == doctest::Approx(1.0));   // sign(+2) * (1/0.5 - 1)
  CHECK(g(1, 1) == doctest::Approx(-1.0));
  for (std::size_t j = 0; j < 3; ++j) CHECK(g(2, j) == 0.0);  // sign(0) row

  const DenseMatrix all_zero = corr_grad_l1(DenseVector(3), gamma);
  for (double v : all_zero.entries()) CHECK(v == 0.0);

  // the reciprocal cap binds when gamma underflows
  DenseVector tiny(3, 0.0);
  const DenseMatrix capped = corr_grad_l1(x, tiny, 1e-12, 1e6);
  CHECK(capped(0, 0) == doctest::Approx(1e6));
}

TEST_CASE("corr_grad_lsq is half the true gradient") {
  RngStream rng(3, 0);
  const std::size_t m = 4, n = 6;
  const DenseMatrix a = gaussian_matrix_normalized(m, n, rng);
  DenseVector y(m);
  for (std::size_t i = 0; i < m; ++i) y[i] = rng.next_gaussian();

  // zero residual -> zero matrix
  DenseVector x_exact(n);
  for (std::size_t j = 0; j < n; ++j) x_exact[j] = rng.next_gaussian();
  const DenseVector y_exact = matvec(a, x_exact);
  DenseVector gamma(n, 0.7);
  const DenseMatrix z = corr_grad_lsq(a, y_exact, x_exact, gamma);
  for (double v : z.entries()) CHECK(std::fabs(v) <= 1e-12);

  // zero gamma -> zero matrix
  const DenseMatrix zg = corr_grad_lsq(a, y, x_exact, DenseVector(n));
  for (double v : zg.entries()) CHECK(v == 0.0);

  // finite differences of ||y - A X gamma||^2 in the entries of X give
  // exactly twice the printed gradient
  DenseMatrix x_v(n, n);
  DenseVector x_d(n);
  for (std::size_t i = 0; i < n; ++i) {
    x_d[i] = -1.0 + 2.0 * rng.next_uniform();
    for (std::size_t j = 0; j < n; ++j) x_v(i, j) = rng.next_gaussian();
  }
  const DenseVector gam = gamma_weights(x_d, 2.0);
  DenseVector x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += x_v(i, j) * gam[j];
    x[i] = acc;
  }
  const DenseMatrix grad = corr_grad_lsq(a, y, x, gam);
  const double h = 1e-6;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      DenseMatrix probe = x_v;
      const auto obj = [&](double v) {
        probe(i, j) = v;
        DenseVector xp(n);
        for (std::size_t r = 0; r < n; ++r) {
          double acc = 0.0;
          for (std::size_t c = 0; c < n; ++c) acc += probe(r, c) * gam[c];
          xp[r] = acc;
        }
        return atomprune::testing::residual_sq(a, y, xp);
      };
      const double base = x_v(i, j);
      const double fd = (obj(base + h) - obj(base - h)) / (2.0 * h);
      if (std::fabs(grad(i, j)) > 1e-6) {
        CHECK(fd / grad(i, j) == doctest::Approx(2.0).epsilon(1e-4));
      }
    }
  }
}

TEST_CASE("corr_update single step from the zero state") {
  RngStream rng(4, 0);
  const std::size_t m = 6, n = 8;
  const DenseMatrix a = gaussian_matrix_normalized(m, n, rng);
  DenseVector y(m);
  for (std::size_t i = 0; i < m; ++i) y[i] = rng.next_gaussian();
  const DenseMatrix c = exponential_correlation(n, 0.9);

  CorrGapConfig cfg;
  cfg.mu_v1 = 0.0;  // isolate the least-squares term
  CorrGapState st = CorrGapState::initial(n, cfg.sigma2_max);
  const DenseVector gamma0 = st.gamma;
  corr_update(st, c, cfg, a, y);

  const DenseVector u = matvec_transpose(a, y);  // residual is y at X_v = 0
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double expected = (cfg.mu_v2 * u[i]) * (c(i, j) * gamma0[j]);
      CHECK(st.x_v(i, j) == doctest::Approx(expected).epsilon(1e-14));
    }
  }
  // nothing moves the detectors while x = 0
  for (std::size_t j = 0; j < n; ++j) CHECK(st.x_d[j] == -1.0);
}

TEST_CASE("corr_update respects Hadamard zeros in C") {
  RngStream rng(5, 0);
  const std::size_t m = 4, n = 3;
  const DenseMatrix a = gaussian_matrix_normalized(m, n, rng);
  DenseVector y(m);
  for (std::size_t i = 0; i < m; ++i) y[i] = rng.next_gaussian();

  DenseMatrix x_v(n, n);
  DenseVector x_d(n);
  for (std::size_t i = 0; i < n; ++i) {
    x_d[i] = -0.5;
    for (std::size_t j = 0; j < n; ++j) x_v(i, j) = rng.next_gaussian();
  }
  CorrGapState st = make_state(x_v, x_d, 5.0);

  CorrGapConfig cfg;
  cfg.mu_v1 = 0.0;
  corr_update(st, DenseMatrix::identity(n), cfg, a, y);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) CHECK(st.x_v(i, j) == x_v(i, j));  // untouched off-diagonal
    }
  }
}

TEST_CASE("gap_corr_solve fixed point and schedule") {
  RngStream rng(6, 0);
  const std::size_t m = 8, n = 12;
  const DenseMatrix a = gaussian_matrix_normalized(m, n, rng);
  const DenseMatrix c = exponential_correlation(n, 0.9);

  const GapSolution sol = gap_corr_solve(a, DenseVector(m), c);
  CHECK(norm2(sol.x_hat) == 0.0);
  CHECK(sol.trace.rows.size() == 491);  // 50 -> 0.9 by 0.1
  for (const TraceRow& row : sol.trace.rows) CHECK(row.inner_iters == 0);

  DenseMatrix asym(n, n);
  asym(0, 1) = 0.3;
  CHECK_THROWS_AS(gap_corr_solve(a, DenseVector(m), asym), std::invalid_argument);
  CHECK_THROWS_AS(gap_corr_solve(a, DenseVector(m), DenseMatrix::identity(4)),
                  std::invalid_argument);
}

TEST_CASE("diagonal reduction reproduces the uncorrelated trajectory") {
  RngStream rng_a(42, 0);
  RngStream rng_x(42, 1);
  const std::size_t m = 8, n = 16;
  const DenseMatrix a = gaussian_matrix_normalized(m, n, rng_a);
  const SparseSignal sig = random_sparse_signal(n, 2, rng_x);
  const DenseVector y = matvec(a, sig.x);

  GapConfig ucfg;
  ucfg.max_inner = 120;
  ucfg.mu_v1_scale = 0.0;
  CorrGapConfig ccfg;
  ccfg.sigma2_max = ucfg.sigma2_max;
  ccfg.sigma2_min = ucfg.sigma2_min;
  ccfg.tau = ucfg.tau;
  ccfg.beta = ucfg.beta;
  ccfg.max_inner = ucfg.max_inner;
  ccfg.mu_v2 = 2.0 * ucfg.mu_v2;
  ccfg.mu_v1 = 0.0;
  ccfg.mu_d_scale = ucfg.mu_d_scale;

  std::vector<double> uncorr_states;  // x_v then x_d per iterate
  const GapSolution usol =
      gap_solve(a, y, ucfg, [&](const GapState& st, std::size_t, std::size_t) {
        for (std::size_t i = 0; i < n; ++i) uncorr_states.push_back(st.x_v[i]);
        for (std::size_t i = 0; i < n; ++i) uncorr_states.push_back(st.x_d[i]);
      });

  double worst = 0.0;
  double worst_offdiag = 0.0;
  std::size_t iterate = 0;
  const GapSolution csol = gap_corr_solve(
      a, y, DenseMatrix::identity(n), ccfg,
      [&](const CorrGapState& st, std::size_t, std::size_t) {
        REQUIRE((iterate + 1) * 2 * n <= uncorr_states.size());
        const double* base = uncorr_states.data() + iterate * 2 * n;
        for (std::size_t i = 0; i < n; ++i) {
          worst = std::max(worst, std::fabs(st.x_v(i, i) - base[i]));
          worst = std::max(worst, std::fabs(st.x_d[i] - base[n + i]));
        }
        if (iterate % 97 == 0) {
          for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
              if (i != j) worst_offdiag = std::max(worst_offdiag, std::fabs(st.x_v(i, j)));
            }
          }
        }
        ++iterate;
      });

  CHECK(iterate * 2 * n == uncorr_states.size());  // same iteration counts
  CHECK(worst <= 1e-10);
  CHECK(worst_offdiag == 0.0);

  REQUIRE(usol.trace.rows.size() == csol.trace.rows.size());
  for (std::size_t i = 0; i < usol.trace.rows.size(); ++i) {
    CHECK(usol.trace.rows[i].inner_iters == csol.trace.rows[i].inner_iters);
    CHECK(std::fabs(usol.trace.rows[i].residual - csol.trace.rows[i].residual) <= 1e-10);
  }
  for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(usol.x_hat[i] - csol.x_hat[i]) <= 1e-10);
}

TEST_CASE("gap_corr_solve recovers a correlated block instance") {
  const std::size_t n = 100, m = 50, l = 10, active = 3;
  const DenseMatrix c_block = exponential_correlation(l, 0.99);
  const DenseMatrix c_total = block_diagonal_correlation(c_block, n / l);

  RngStream rng_a(2025, 0);
  RngStream rng_x(2025, 1);
  const DenseMatrix a = gaussian_matrix_normalized(m, n, rng_a);
  const BlockSparseSignal sig = correlated_block_sparse_signal(n, l, active, c_block, rng_x);
  const DenseVector y = matvec(a, sig.x);

  const GapSolution sol = gap_corr_solve(a, y, c_total);
  CHECK(distortion(sig.x, sol.x_hat) <= 1e-2);

  bool gamma_ok = true;
  const GapSolution watched =
      gap_corr_solve(a, y, c_total, CorrGapConfig{},
                     [&](const CorrGapState& st, std::size_t, std::size_t) {
                       for (double g : st.gamma) gamma_ok = gamma_ok && g >= 0.0 && g <= 1.0;
                     });
  CHECK(gamma_ok);
  CHECK(watched.x_hat == sol.x_hat);  // determinism
}

TEST_CASE("gap_corr_solve divergence guard") {
  RngStream rng(7, 0);
  const std::size_t m = 6, n = 10;
  const DenseMatrix a = gaussian_matrix_normalized(m, n, rng);
  DenseVector y(m);
  for (std::size_t i = 0; i < m; ++i) y[i] = rng.next_gaussian();

  CorrGapConfig wild;
  wild.mu_v2 = 1e9;
  CHECK_THROWS_AS(gap_corr_solve(a, y, DenseMatrix::identity(n), wild), DivergenceError);
}
