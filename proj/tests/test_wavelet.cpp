#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "atomprune/dense.hpp"
#include "atomprune/eig.hpp"
#include "atomprune/haar.hpp"
#include "atomprune/rng.hpp"
#include "atomprune/sampling.hpp"
#include "atomprune/signals.hpp"

using namespace atomprune;

namespace {

double max_entry_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      worst = std::max(worst, std::fabs(a(i, j) - b(i, j)));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("single-stage butterfly matrix") {
  const DenseMatrix g = haar_analysis_matrix(2, 1);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(g(0, 0) == doctest::Approx(r));
  CHECK(g(0, 1) == doctest::Approx(r));
  CHECK(g(1, 0) == doctest::Approx(r));
  CHECK(g(1, 1) == doctest::Approx(-r));
}

TEST_CASE("analysis matrices are orthonormal") {
  for (std::size_t n : {8u, 64u, 256u}) {
    const std::size_t levels = std::min<std::size_t>(3, n);
    const DenseMatrix g = haar_analysis_matrix(n, levels);
    const DenseMatrix ggt = matmul_abt(g, g);
    CHECK(max_entry_diff(ggt, DenseMatrix::identity(n)) <= 1e-10);
  }
}

TEST_CASE("three-level transform of length 8 starts with the average row") {
  const DenseMatrix g = haar_analysis_matrix(8, 3);
  const double r = 1.0 / std::sqrt(8.0);
  for (std::size_t j = 0; j < 8; ++j) CHECK(g(0, j) == doctest::Approx(r));
}

TEST_CASE("constant and zero signals transform as expected") {
  const double c = 3.25;
  const DenseVector constant(8, c);
  const DenseVector coeffs = haar_forward(constant, 3);
  CHECK(coeffs[0] == doctest::Approx(c * std::sqrt(8.0)));
  for (std::size_t i = 1; i < 8; ++i) CHECK(std::fabs(coeffs[i]) <= 1e-12);

  const DenseVector zero(16);
  const DenseVector zc = haar_forward(zero, 2);
  for (double v : zc) CHECK(v == 0.0);
}

TEST_CASE("fast transform matches the matrix form") {
  for (std::size_t n : {8u, 64u, 256u, 1024u}) {
    const std::size_t levels = 3;
    const DenseMatrix g = haar_analysis_matrix(n, levels);
    RngStream rng(n, 0);
    for (int rep = 0; rep < 100; ++rep) {
      const DenseVector s = gaussian_vector(n, rng);
      const DenseVector fast = haar_forward(s, levels);
      const DenseVector slow = matvec(g, s);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::fabs(fast[i] - slow[i]) <= 1e-10);
      }
    }
  }
}

TEST_CASE("round trip and energy preservation") {
  for (std::size_t n : {8u, 64u, 1024u}) {
    RngStream rng(n, 1);
    const DenseVector s = gaussian_vector(n, rng);
    const std::size_t levels = 3;
    const DenseVector coeffs = haar_forward(s, levels);
    const DenseVector back = haar_inverse(coeffs, levels);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(back[i] - s[i]) <= 1e-10);
    CHECK(std::fabs(norm2(coeffs) - norm2(s)) <= 1e-10);
  }
}

TEST_CASE("a single coarse coefficient synthesizes a constant") {
  DenseVector coeffs(8);
  coeffs[0] = std::sqrt(8.0);
  const DenseVector s = haar_inverse(coeffs, 3);
  for (double v : s) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("invalid shapes are rejected") {
  CHECK_THROWS_AS(haar_forward(DenseVector(12), 2), std::invalid_argument);
  CHECK_THROWS_AS(haar_forward(DenseVector(8), 0), std::invalid_argument);
  CHECK_THROWS_AS(haar_forward(DenseVector(8), 4), std::invalid_argument);
  CHECK_THROWS_AS(haar_analysis_matrix(10, 1), std::invalid_argument);
}

TEST_CASE("transform_correlation conjugates correctly") {
  const DenseMatrix g = haar_analysis_matrix(8, 3);

  const DenseMatrix gi = transform_correlation(g, DenseMatrix::identity(8));
  CHECK(max_entry_diff(gi, DenseMatrix::identity(8)) <= 1e-10);

  const DenseMatrix c = exponential_correlation(8, 0.9);
  const DenseMatrix ci = transform_correlation(DenseMatrix::identity(8), c);
  CHECK(max_entry_diff(ci, c) <= 1e-12);

  const DenseMatrix cg = transform_correlation(g, c);
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = 0; j < 8; ++j) CHECK(cg(i, j) == cg(j, i));
  }
  double trace = 0.0;
  for (std::size_t i = 0; i < 8; ++i) trace += cg(i, i);
  CHECK(trace == doctest::Approx(8.0).epsilon(1e-10));

  // orthonormal conjugation preserves the eigenvalue multiset
  const EigDecomposition before = symmetric_eig(c);
  const EigDecomposition after = symmetric_eig(cg);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(std::fabs(before.eigenvalues[i] - after.eigenvalues[i]) <= 1e-8);
  }
  CHECK(after.eigenvalues[7] >= -1e-10);

  CHECK_THROWS_AS(transform_correlation(g, DenseMatrix::identity(4)), std::invalid_argument);
}
