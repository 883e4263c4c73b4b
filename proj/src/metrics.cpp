#include "atomprune/metrics.hpp"

#include <stdexcept>

namespace atomprune {

double distortion(const DenseVector& x_true, const DenseVector& x_hat) {
  if (x_true.size() != x_hat.size()) throw std::invalid_argument("distortion: length mismatch");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x_true.size(); ++i) {
    const double d = x_true[i] - x_hat[i];
    num += d * d;
    den += x_true[i] * x_true[i];
  }
  if (den == 0.0) throw std::invalid_argument("distortion: undefined for a zero reference");
  return num / den;
}

}  // namespace atomprune
