#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "atomprune/dense.hpp"
#include "atomprune/errors.hpp"
#include "atomprune/iht.hpp"
#include "atomprune/l0_oracle.hpp"
#include "atomprune/metrics.hpp"
#include "atomprune/rng.hpp"
#include "atomprune/sampling.hpp"
#include "atomprune/signals.hpp"
#include "atomprune/sl0.hpp"

using namespace atomprune;

namespace {

std::vector<std::size_t> top_magnitude_support(const DenseVector& x, std::size_t k) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&x](std::size_t i, std::size_t j) {
    const double ai = std::fabs(x[i]);
    const double aj = std::fabs(x[j]);
    if (ai != aj) return ai > aj;
    return i < j;
  });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

struct PlantedInstance {
  DenseMatrix a;
  DenseVector y;
  DenseVector x_true;
  std::vector<std::size_t> support;
};

PlantedInstance make_instance(std::size_t n, std::size_t m, std::size_t k, std::uint64_t seed) {
  RngStream rng_a(seed, 0);
  RngStream rng_x(seed, 1);
  PlantedInstance inst;
  inst.a = gaussian_matrix_normalized(m, n, rng_a);
  SparseSignal sig = random_sparse_signal(n, k, rng_x);
  inst.x_true = std::move(sig.x);
  inst.support = std::move(sig.support);
  inst.y = matvec(inst.a, inst.x_true);
  return inst;
}

}  // namespace

TEST_CASE("l0 oracle recovers single columns and planted supports") {
  RngStream rng(1, 0);
  const DenseMatrix a = gaussian_matrix_normalized(10, 20, rng);

  DenseVector y(10);
  for (std::size_t i = 0; i < 10; ++i) y[i] = 3.0 * a(i, 7);
  const L0OracleResult single = l0_oracle_solve(a, y, 2);
  REQUIRE(single.support.size() == 1);
  CHECK(single.support[0] == 7);
  CHECK(single.x_hat[7] == doctest::Approx(3.0));

  const PlantedInstance inst = make_instance(20, 10, 2, 99);
  const L0OracleResult planted = l0_oracle_solve(inst.a, inst.y, 3);
  CHECK(planted.support == inst.support);
  CHECK(distortion(inst.x_true, planted.x_hat) <= 1e-12);

  // zero measurements: the empty support fits
  const L0OracleResult zero = l0_oracle_solve(a, DenseVector(10), 2);
  CHECK(zero.support.empty());
  CHECK(norm2(zero.x_hat) == 0.0);
}

TEST_CASE("l0 oracle reports infeasibility and budget overruns") {
  RngStream rng(2, 0);
  const DenseMatrix a = gaussian_matrix_normalized(10, 15, rng);
  DenseVector y(10);
  for (std::size_t i = 0; i < 10; ++i) y[i] = rng.next_gaussian();
  // a dense random right-hand side is not 1-sparse in a generic dictionary
  CHECK_THROWS_AS(l0_oracle_solve(a, y, 1), InfeasibleError);

  RngStream rng2(3, 0);
  const DenseMatrix big = gaussian_matrix_normalized(10, 100, rng2);
  CHECK_THROWS_AS(l0_oracle_solve(big, DenseVector(10, 1.0), 4), BudgetError);
}

TEST_CASE("sl0 fixed points and exact solves") {
  RngStream rng(4, 0);
  const DenseMatrix a = gaussian_matrix_normalized(8, 16, rng);
  const DenseVector x0 = sl0_solve(a, DenseVector(8));
  CHECK(norm2(x0) == 0.0);

  // square invertible system: the projection pins the unique solution
  RngStream rng_sq(5, 0);
  const DenseMatrix sq = gaussian_matrix_normalized(12, 12, rng_sq);
  DenseVector xs(12);
  for (std::size_t i = 0; i < 12; ++i) xs[i] = rng_sq.next_gaussian();
  const DenseVector ys = matvec(sq, xs);
  const DenseVector xhat = sl0_solve(sq, ys);
  CHECK(distortion(xs, xhat) <= 1e-16);
}

TEST_CASE("sl0 recovers a sparse planted instance and stays feasible") {
  const PlantedInstance inst = make_instance(60, 30, 3, 12345);
  const DenseVector x_hat = sl0_solve(inst.a, inst.y);
  CHECK(distortion(inst.x_true, x_hat) <= 1e-3);
  CHECK(top_magnitude_support(x_hat, 3) == inst.support);

  for (std::uint64_t seed : {7u, 8u, 9u}) {
    const PlantedInstance p = make_instance(40, 20, 3, seed);
    const DenseVector xh = sl0_solve(p.a, p.y);
    DenseVector r = matvec(p.a, xh);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= p.y[i];
    CHECK(norm2(r) <= 1e-8 * norm2(p.y));  // projection post-condition
  }
}

TEST_CASE("sl0 rejects rank-deficient measurement matrices") {
  DenseMatrix a(2, 4);
  for (std::size_t j = 0; j < 4; ++j) {
    a(0, j) = 1.0;
    a(1, j) = 1.0;  // duplicate rows
  }
  CHECK_THROWS_AS(sl0_solve(a, DenseVector(2, 1.0)), std::invalid_argument);
}

TEST_CASE("iht fixed points, identity case, and sparsity bound") {
  RngStream rng(6, 0);
  const DenseMatrix a = gaussian_matrix_normalized(8, 16, rng);
  IhtConfig cfg;
  cfg.k = 3;
  const DenseVector x0 = iht_solve(a, DenseVector(8), cfg);
  CHECK(norm2(x0) == 0.0);

  const DenseMatrix eye = DenseMatrix::identity(6);
  DenseVector y(6);
  for (std::size_t i = 0; i < 6; ++i) y[i] = rng.next_gaussian();
  IhtConfig full;
  full.k = 6;
  const DenseVector xi = iht_solve(eye, y, full);
  for (std::size_t i = 0; i < 6; ++i) CHECK(xi[i] == doctest::Approx(y[i]));

  const PlantedInstance inst = make_instance(60, 30, 3, 2222);
  IhtConfig k3;
  k3.k = 3;
  const DenseVector x_hat = iht_solve(inst.a, inst.y, k3);
  CHECK(distortion(inst.x_true, x_hat) <= 1e-3);

  // support bound holds even on hopeless instances
  const PlantedInstance hard = make_instance(50, 10, 9, 3333);
  IhtConfig k9;
  k9.k = 9;
  const DenseVector xh = iht_solve(hard.a, hard.y, k9);
  std::size_t nnz = 0;
  for (double v : xh) nnz += v != 0.0;
  CHECK(nnz <= 9);
}

TEST_CASE("solvers agree with the oracle on small instances") {
  // consistency triangle at desk scale; whenever a solver reaches oracle
  // quality its support matches the oracle's
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t k = 1 + seed % 3;
    const PlantedInstance inst = make_instance(30, 2 * k + 6, k, 500 + seed);
    const L0OracleResult oracle = l0_oracle_solve(inst.a, inst.y, k);
    CHECK(oracle.support == inst.support);

    const DenseVector sl0_hat = sl0_solve(inst.a, inst.y);
    if (distortion(inst.x_true, sl0_hat) <= 1e-3) {
      CHECK(top_magnitude_support(sl0_hat, k) == oracle.support);
    }
    IhtConfig ic;
    ic.k = k;
    const DenseVector iht_hat = iht_solve(inst.a, inst.y, ic);
    if (distortion(inst.x_true, iht_hat) <= 1e-3) {
      CHECK(top_magnitude_support(iht_hat, k) == oracle.support);
    }
  }
}
