#pragma once

#include "atomprune/dense.hpp"

namespace atomprune {

/// Relative squared error ||x_true - x_hat||^2 / ||x_true||^2.
double distortion(const DenseVector& x_true, const DenseVector& x_hat);

}  // namespace atomprune
