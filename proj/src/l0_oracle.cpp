#include "atomprune/l0_oracle.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

#include "atomprune/errors.hpp"

namespace atomprune {

namespace {

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double acc = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    acc = acc * static_cast<double>(n - k + i) / static_cast<double>(i);
    if (acc > 1e18) return acc;  // saturate; only compared against the budget
  }
  return acc;
}

/// Least-squares fit restricted to `support` columns; returns the residual
/// norm, or nothing when the subsystem is numerically singular.
std::optional<double> fit_support(const DenseMatrix& a, const DenseVector& y,
                                  const std::vector<std::size_t>& support,
                                  std::vector<double>& coeffs) {
  const std::size_t s = support.size();
  const std::size_t m = a.rows();
  // normal equations on the restricted columns
  std::vector<double> gram(s * s, 0.0);
  std::vector<double> rhs(s, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = a.row(i);
    for (std::size_t p = 0; p < s; ++p) {
      const double ap = row[support[p]];
      rhs[p] += ap * y[i];
      for (std::size_t q = p; q < s; ++q) gram[p * s + q] += ap * row[support[q]];
    }
  }
  // Cholesky in place
  for (std::size_t p = 0; p < s; ++p) {
    for (std::size_t q = p; q < s; ++q) {
      double acc = gram[p * s + q];
      for (std::size_t k = 0; k < p; ++k) acc -= gram[k * s + p] * gram[k * s + q];
      if (p == q) {
        if (acc <= 1e-13) return std::nullopt;
        gram[p * s + q] = std::sqrt(acc);
      } else {
        gram[p * s + q] = acc / gram[p * s + p];
      }
    }
  }
  coeffs.assign(rhs.begin(), rhs.end());
  for (std::size_t p = 0; p < s; ++p) {
    double acc = coeffs[p];
    for (std::size_t k = 0; k < p; ++k) acc -= gram[k * s + p] * coeffs[k];
    coeffs[p] = acc / gram[p * s + p];
  }
  for (std::size_t pp = s; pp-- > 0;) {
    double acc = coeffs[pp];
    for (std::size_t k = pp + 1; k < s; ++k) acc -= gram[pp * s + k] * coeffs[k];
    coeffs[pp] = acc / gram[pp * s + pp];
  }

  double res = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double fit = 0.0;
    const double* row = a.row(i);
    for (std::size_t p = 0; p < s; ++p) fit += row[support[p]] * coeffs[p];
    const double d = y[i] - fit;
    res += d * d;
  }
  return std::sqrt(res);
}

bool next_combination(std::vector<std::size_t>& support, std::size_t n) {
  const std::size_t size = support.size();
  std::size_t i = size;
  while (i-- > 0) {
    if (support[i] != i + n - size) {
      ++support[i];
      for (std::size_t j = i + 1; j < size; ++j) support[j] = support[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

L0OracleResult l0_oracle_solve(const DenseMatrix& a, const DenseVector& y, std::size_t k_max) {
  if (a.rows() != y.size()) throw std::invalid_argument("l0_oracle_solve: dimension mismatch");
  const std::size_t n = a.cols();
  if (k_max > n) throw std::invalid_argument("l0_oracle_solve: k_max exceeds signal length");
  if (binomial(n, k_max) > 1e6) {
    throw BudgetError("l0_oracle_solve: C(n, k_max) exceeds the enumeration budget of 1e6");
  }

  const double y_norm = norm2(y);
  const double tol = 1e-8 * y_norm;
  if (y_norm == 0.0) return L0OracleResult{DenseVector(n), {}};

  std::vector<double> coeffs;
  for (std::size_t size = 1; size <= k_max; ++size) {
    std::vector<std::size_t> support(size);
    for (std::size_t i = 0; i < size; ++i) support[i] = i;

    std::optional<double> best_res;
    std::vector<std::size_t> best_support;
    std::vector<double> best_coeffs;

    do {
      const auto res = fit_support(a, y, support, coeffs);
      if (res && *res <= tol && (!best_res || *res < *best_res)) {
        best_res = *res;
        best_support = support;
        best_coeffs = coeffs;
      }
    } while (next_combination(support, n));

    if (best_res) {
      L0OracleResult out{DenseVector(n), std::move(best_support)};
      for (std::size_t p = 0; p < out.support.size(); ++p) out.x_hat[out.support[p]] = best_coeffs[p];
      return out;
    }
  }
  throw InfeasibleError("l0_oracle_solve: no support of size <= " + std::to_string(k_max) +
                        " fits the measurements");
}

}  // namespace atomprune
