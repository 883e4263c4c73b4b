#pragma once

#include <cstddef>

#include "atomprune/dense.hpp"

namespace atomprune {

/// Orthonormal multi-level Haar transform (1/sqrt(2) butterflies).
///
/// Coefficient layout, frozen repo-wide: the coarsest-scale averages occupy
/// the first n/2^levels slots, followed by detail bands from coarsest to
/// finest. This is the natural in-place pyramid layout; the recovery matrix
/// A = Phi * G^T depends on it only up to column permutation.

/// Throws unless n is a power of two and 1 <= levels <= log2(n).
void validate_haar_shape(std::size_t n, std::size_t levels);

/// O(n) analysis pyramid.
DenseVector haar_forward(const DenseVector& s, std::size_t levels);

/// Inverse of haar_forward.
DenseVector haar_inverse(const DenseVector& coeffs, std::size_t levels);

/// Analysis matrix G with G*s = haar_forward(s); the synthesis dictionary is
/// G^T.
DenseMatrix haar_analysis_matrix(std::size_t n, std::size_t levels);

/// G * C * G^T, symmetrized as (R + R^T)/2 to remove rounding asymmetry.
DenseMatrix transform_correlation(const DenseMatrix& g, const DenseMatrix& c);

}  // namespace atomprune
