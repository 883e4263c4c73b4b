#include "atomprune/solve.hpp"

#include <cmath>
#include <stdexcept>

namespace atomprune {

CholeskySolver::CholeskySolver(const DenseMatrix& spd) : n_(spd.rows()), l_(n_ * n_, 0.0) {
  if (spd.rows() != spd.cols()) throw std::invalid_argument("CholeskySolver: matrix not square");

  double max_diag = 0.0;
  for (std::size_t i = 0; i < n_; ++i) max_diag = std::max(max_diag, std::fabs(spd(i, i)));
  const double pivot_tol = 1e-13 * std::max(1.0, max_diag);

  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = spd(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= l_[i * n_ + k] * l_[j * n_ + k];
      if (i == j) {
        if (acc <= pivot_tol) {
          throw std::invalid_argument("CholeskySolver: matrix not positive definite");
        }
        l_[i * n_ + j] = std::sqrt(acc);
      } else {
        l_[i * n_ + j] = acc / l_[j * n_ + j];
      }
    }
  }
}

void CholeskySolver::solve_inplace(DenseVector& rhs) const {
  if (rhs.size() != n_) throw std::invalid_argument("CholeskySolver: rhs length mismatch");
  // forward substitution L z = rhs
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = rhs[i];
    for (std::size_t k = 0; k < i; ++k) acc -= l_[i * n_ + k] * rhs[k];
    rhs[i] = acc / l_[i * n_ + i];
  }
  // back substitution L^T x = z
  for (std::size_t ii = n_; ii-- > 0;) {
    double acc = rhs[ii];
    for (std::size_t k = ii + 1; k < n_; ++k) acc -= l_[k * n_ + ii] * rhs[k];
    rhs[ii] = acc / l_[ii * n_ + ii];
  }
}

DenseVector CholeskySolver::solve(const DenseVector& rhs) const {
  DenseVector x = rhs;
  solve_inplace(x);
  return x;
}

}  // namespace atomprune
