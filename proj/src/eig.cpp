#include "atomprune/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "atomprune/errors.hpp"

namespace atomprune {

namespace {

double frobenius(const DenseMatrix& m) {
  double acc = 0.0;
  for (double v : m.entries()) acc += v * v;
  return std::sqrt(acc);
}

double off_diagonal_frobenius(const DenseMatrix& m) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (i != j) acc += m(i, j) * m(i, j);
    }
  }
  return std::sqrt(acc);
}

void check_symmetric(const DenseMatrix& c) {
  if (c.rows() != c.cols()) throw std::invalid_argument("symmetric_eig: matrix not square");
  const double scale = std::max(1.0, max_abs(c));
  for (std::size_t i = 0; i < c.rows(); ++i) {
    for (std::size_t j = i + 1; j < c.cols(); ++j) {
      if (std::fabs(c(i, j) - c(j, i)) > 1e-10 * scale) {
        throw std::invalid_argument("symmetric_eig: matrix not symmetric");
      }
    }
  }
}

}  // namespace

EigDecomposition symmetric_eig(const DenseMatrix& c) {
  check_symmetric(c);
  const std::size_t n = c.rows();

  DenseMatrix a = c;
  DenseMatrix v = DenseMatrix::identity(n);

  const double norm = frobenius(c);
  if (norm > 0.0) {
    const double tol = 1e-12 * norm;
    // Skipping rotations below tol/n still guarantees the sweep-level target:
    // n*(n-1)/2 entries each below tol/n keep the off mass under tol.
    const double rot_eps = tol / static_cast<double>(n);
    const std::size_t max_sweeps = 64;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
      if (off_diagonal_frobenius(a) <= tol) break;
      for (std::size_t p = 0; p + 1 < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
          const double apq = a(p, q);
          if (std::fabs(apq) <= rot_eps) continue;

          const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
          double t;
          if (std::fabs(theta) > 1e150) {
            t = 1.0 / (2.0 * theta);  // avoid theta^2 overflow
          } else {
            t = 1.0 / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
            if (theta < 0.0) t = -t;
          }
          const double cs = 1.0 / std::sqrt(t * t + 1.0);
          const double sn = t * cs;

          for (std::size_t k = 0; k < n; ++k) {
            const double akp = a(k, p);
            const double akq = a(k, q);
            a(k, p) = cs * akp - sn * akq;
            a(k, q) = sn * akp + cs * akq;
          }
          for (std::size_t k = 0; k < n; ++k) {
            const double apk = a(p, k);
            const double aqk = a(q, k);
            a(p, k) = cs * apk - sn * aqk;
            a(q, k) = sn * apk + cs * aqk;
          }
          a(p, q) = 0.0;
          a(q, p) = 0.0;

          for (std::size_t k = 0; k < n; ++k) {
            const double vkp = v(k, p);
            const double vkq = v(k, q);
            v(k, p) = cs * vkp - sn * vkq;
            v(k, q) = sn * vkp + cs * vkq;
          }
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&a](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  EigDecomposition out{DenseMatrix(n, n), DenseVector(n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = v(i, order[j]);
  }
  return out;
}

DenseMatrix correlation_factor(const DenseMatrix& c) {
  EigDecomposition eig = symmetric_eig(c);
  const std::size_t n = c.rows();
  for (std::size_t j = 0; j < n; ++j) {
    const double lambda = eig.eigenvalues[j];
    if (lambda < -1e-10) {
      throw NotPsdError("correlation_factor: eigenvalue " + std::to_string(lambda) +
                        " below the PSD tolerance");
    }
  }
  DenseMatrix f = eig.eigenvectors;
  for (std::size_t j = 0; j < n; ++j) {
    const double s = std::sqrt(std::max(eig.eigenvalues[j], 0.0));
    for (std::size_t i = 0; i < n; ++i) f(i, j) *= s;
  }
  return f;
}

}  // namespace atomprune
