#pragma once

// Test-only numerical oracles, independent of the solver code paths they
// check.

#include <cmath>
#include <functional>

#include "atomprune/dense.hpp"

namespace atomprune::testing {

/// Central finite difference of f along coordinate i.
inline double central_diff(const std::function<double(const DenseVector&)>& f, DenseVector x,
                           std::size_t i, double h = 1e-6) {
  const double xi = x[i];
  x[i] = xi + h;
  const double hi = f(x);
  x[i] = xi - h;
  const double lo = f(x);
  x[i] = xi;
  return (hi - lo) / (2.0 * h);
}

inline double rel_error(double got, double want) {
  const double scale = std::max(std::fabs(want), 1e-12);
  return std::fabs(got - want) / scale;
}

inline double l1_norm(const DenseVector& v) {
  double acc = 0.0;
  for (double x : v) acc += std::fabs(x);
  return acc;
}

inline double residual_sq(const DenseMatrix& a, const DenseVector& y, const DenseVector& x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double fit = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) fit += a(i, j) * x[j];
    const double d = y[i] - fit;
    acc += d * d;
  }
  return acc;
}

}  // namespace atomprune::testing
