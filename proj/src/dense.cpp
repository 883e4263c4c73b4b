#include "atomprune/dense.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace atomprune {

namespace {

void check_finite(const std::vector<double>& entries, const char* what) {
  for (double v : entries) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(std::string(what) + ": non-finite entry");
    }
  }
}

}  // namespace

DenseVector::DenseVector(std::size_t n) : entries_(n, 0.0) {
  if (n == 0) throw std::invalid_argument("DenseVector: length must be positive");
}

DenseVector::DenseVector(std::size_t n, double fill) : entries_(n, fill) {
  if (n == 0) throw std::invalid_argument("DenseVector: length must be positive");
  if (!std::isfinite(fill)) throw std::invalid_argument("DenseVector: non-finite fill");
}

DenseVector::DenseVector(std::vector<double> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw std::invalid_argument("DenseVector: length must be positive");
  check_finite(entries_, "DenseVector");
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {
  if (rows == 0 || cols == 0) {
    throw std::invalid_argument("DenseMatrix: dimensions must be positive");
  }
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows == 0 || cols == 0) {
    throw std::invalid_argument("DenseMatrix: dimensions must be positive");
  }
  if (entries_.size() != rows * cols) {
    throw std::invalid_argument("DenseMatrix: entry count does not match dimensions");
  }
  check_finite(entries_, "DenseMatrix");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double dot(const DenseVector& a, const DenseVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm1(const DenseVector& v) {
  double acc = 0.0;
  for (double x : v) acc += std::fabs(x);
  return acc;
}

double norm2(const DenseVector& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

double norm_inf(const DenseVector& v) {
  double acc = 0.0;
  for (double x : v) acc = std::max(acc, std::fabs(x));
  return acc;
}

double max_abs(const DenseMatrix& m) {
  double acc = 0.0;
  for (double x : m.entries()) acc = std::max(acc, std::fabs(x));
  return acc;
}

void matvec(const DenseMatrix& a, const DenseVector& x, DenseVector& out) {
  if (a.cols() != x.size()) throw std::invalid_argument("matvec: dimension mismatch");
  if (out.size() != a.rows()) out = DenseVector(a.rows());
  const double* xp = x.data();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* row = a.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += row[j] * xp[j];
    out[i] = acc;
  }
}

DenseVector matvec(const DenseMatrix& a, const DenseVector& x) {
  DenseVector out(a.rows());
  matvec(a, x, out);
  return out;
}

void matvec_transpose(const DenseMatrix& a, const DenseVector& r, DenseVector& out) {
  if (a.rows() != r.size()) throw std::invalid_argument("matvec_transpose: dimension mismatch");
  if (out.size() != a.cols()) out = DenseVector(a.cols());
  double* op = out.data();
  for (std::size_t j = 0; j < a.cols(); ++j) op[j] = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double ri = r[i];
    const double* row = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) op[j] += row[j] * ri;
  }
}

DenseVector matvec_transpose(const DenseMatrix& a, const DenseVector& r) {
  DenseVector out(a.cols());
  matvec_transpose(a, r, out);
  return out;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: dimension mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* crow = c.row(i);
    const double* arow = a.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

DenseMatrix matmul_abt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("matmul_abt: dimension mismatch");
  DenseMatrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* arow = a.row(i);
    double* crow = c.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const double* brow = b.row(j);
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += arow[k] * brow[k];
      crow[j] = acc;
    }
  }
  return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  }
  return t;
}

}  // namespace atomprune
