#include "atomprune/haar.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace atomprune {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

void validate_haar_shape(std::size_t n, std::size_t levels) {
  if (!is_power_of_two(n) || n < 2) {
    throw std::invalid_argument("haar: length must be a power of two >= 2");
  }
  std::size_t max_levels = 0;
  for (std::size_t len = n; len > 1; len >>= 1) ++max_levels;
  if (levels < 1 || levels > max_levels) {
    throw std::invalid_argument("haar: levels out of range");
  }
}

DenseVector haar_forward(const DenseVector& s, std::size_t levels) {
  validate_haar_shape(s.size(), levels);
  DenseVector out = s;
  std::vector<double> scratch(s.size());
  std::size_t len = s.size();
  for (std::size_t level = 0; level < levels; ++level) {
    const std::size_t half = len / 2;
    for (std::size_t i = 0; i < half; ++i) {
      const double a = out[2 * i];
      const double b = out[2 * i + 1];
      scratch[i] = (a + b) * kInvSqrt2;
      scratch[half + i] = (a - b) * kInvSqrt2;
    }
    for (std::size_t i = 0; i < len; ++i) out[i] = scratch[i];
    len = half;
  }
  return out;
}

DenseVector haar_inverse(const DenseVector& coeffs, std::size_t levels) {
  validate_haar_shape(coeffs.size(), levels);
  DenseVector out = coeffs;
  std::vector<double> scratch(coeffs.size());
  std::size_t len = coeffs.size() >> levels;
  for (std::size_t level = 0; level < levels; ++level) {
    const std::size_t full = len * 2;
    for (std::size_t i = 0; i < len; ++i) {
      const double a = out[i];
      const double d = out[len + i];
      scratch[2 * i] = (a + d) * kInvSqrt2;
      scratch[2 * i + 1] = (a - d) * kInvSqrt2;
    }
    for (std::size_t i = 0; i < full; ++i) out[i] = scratch[i];
    len = full;
  }
  return out;
}

DenseMatrix haar_analysis_matrix(std::size_t n, std::size_t levels) {
  validate_haar_shape(n, levels);
  DenseMatrix g(n, n);
  DenseVector e(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const DenseVector col = haar_forward(e, levels);
    for (std::size_t i = 0; i < n; ++i) g(i, j) = col[i];
    e[j] = 0.0;
  }
  return g;
}

DenseMatrix transform_correlation(const DenseMatrix& g, const DenseMatrix& c) {
  if (g.rows() != g.cols() || c.rows() != c.cols() || g.cols() != c.rows()) {
    throw std::invalid_argument("transform_correlation: dimension mismatch");
  }
  const DenseMatrix gc = matmul(g, c);
  DenseMatrix r = matmul_abt(gc, g);
  for (std::size_t i = 0; i < r.rows(); ++i) {
    for (std::size_t j = i + 1; j < r.cols(); ++j) {
      const double v = 0.5 * (r(i, j) + r(j, i));
      r(i, j) = v;
      r(j, i) = v;
    }
  }
  return r;
}

}  // namespace atomprune
