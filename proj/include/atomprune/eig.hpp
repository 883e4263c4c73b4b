#pragma once

#include "atomprune/dense.hpp"

namespace atomprune {

struct EigDecomposition {
  DenseMatrix eigenvectors;  // orthogonal; column j pairs with eigenvalues[j]
  DenseVector eigenvalues;   // descending
};

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Converges when the off-diagonal Frobenius mass drops below 1e-12 * ||C||_F.
/// Input must be square and symmetric (checked to 1e-10, scaled by the largest
/// entry magnitude).
EigDecomposition symmetric_eig(const DenseMatrix& c);

/// Factor F = Q * diag(sqrt(lambda)) of a symmetric PSD matrix, so that
/// F F^T = C. Eigenvalues in [-1e-10, 0) are clamped to zero; anything more
/// negative raises NotPsdError.
DenseMatrix correlation_factor(const DenseMatrix& c);

}  // namespace atomprune
