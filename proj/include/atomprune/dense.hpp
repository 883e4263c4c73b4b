#pragma once

#include <cstddef>
#include <vector>

namespace atomprune {

/// Dense real vector. Entries handed in at construction must be finite;
/// callers mutating through data() keep that contract themselves.
class DenseVector {
 public:
  DenseVector() = default;
  explicit DenseVector(std::size_t n);
  DenseVector(std::size_t n, double fill);
  explicit DenseVector(std::vector<double> entries);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  double operator[](std::size_t i) const noexcept { return entries_[i]; }
  double& operator[](std::size_t i) noexcept { return entries_[i]; }

  double* data() noexcept { return entries_.data(); }
  const double* data() const noexcept { return entries_.data(); }

  auto begin() noexcept { return entries_.begin(); }
  auto end() noexcept { return entries_.end(); }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  const std::vector<double>& entries() const noexcept { return entries_; }

  bool operator==(const DenseVector&) const = default;

 private:
  std::vector<double> entries_;
};

/// Dense real matrix, row-major. Same finiteness contract as DenseVector.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return entries_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) noexcept {
    return entries_[i * cols_ + j];
  }

  const double* row(std::size_t i) const noexcept { return entries_.data() + i * cols_; }
  double* row(std::size_t i) noexcept { return entries_.data() + i * cols_; }

  double* data() noexcept { return entries_.data(); }
  const double* data() const noexcept { return entries_.data(); }

  const std::vector<double>& entries() const noexcept { return entries_; }

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

inline double sign(double v) noexcept { return static_cast<double>(v > 0.0) - static_cast<double>(v < 0.0); }

double dot(const DenseVector& a, const DenseVector& b);
double norm1(const DenseVector& v);
double norm2(const DenseVector& v);
double norm_inf(const DenseVector& v);
double max_abs(const DenseMatrix& m);

/// out = a * x
void matvec(const DenseMatrix& a, const DenseVector& x, DenseVector& out);
DenseVector matvec(const DenseMatrix& a, const DenseVector& x);

/// out = a^T * r
void matvec_transpose(const DenseMatrix& a, const DenseVector& r, DenseVector& out);
DenseVector matvec_transpose(const DenseMatrix& a, const DenseVector& r);

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
/// a * b^T; cheaper than matmul(a, transpose(b)) for row-major storage.
DenseMatrix matmul_abt(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);

}  // namespace atomprune
