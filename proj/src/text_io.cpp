#include "atomprune/text_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <system_error>

#include "atomprune/errors.hpp"

namespace atomprune {

namespace {

double parse_value(const std::string& token, const char* what) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw IoError(std::string(what) + ": malformed value '" + token + "'");
  }
  return v;
}

std::size_t parse_count(std::istream& is, const char* what) {
  long long n = 0;
  if (!(is >> n) || n <= 0) {
    throw IoError(std::string(what) + ": bad dimension header");
  }
  return static_cast<std::size_t>(n);
}

double next_value(std::istream& is, const char* what) {
  std::string token;
  if (!(is >> token)) throw IoError(std::string(what) + ": truncated data");
  return parse_value(token, what);
}

}  // namespace

std::string format_value(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
  if (ec != std::errc()) throw IoError("format_value: conversion failed");
  return std::string(buf, ptr);
}

void write_matrix(std::ostream& os, const DenseMatrix& m) {
  os << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << format_value(m(i, j));
    }
    os << '\n';
  }
}

void write_vector(std::ostream& os, const DenseVector& v) {
  os << v.size() << '\n';
  for (std::size_t i = 0; i < v.size(); ++i) os << format_value(v[i]) << '\n';
}

DenseMatrix read_matrix(std::istream& is) {
  const std::size_t rows = parse_count(is, "read_matrix");
  const std::size_t cols = parse_count(is, "read_matrix");
  std::vector<double> entries(rows * cols);
  for (std::size_t i = 0; i < entries.size(); ++i) entries[i] = next_value(is, "read_matrix");
  return DenseMatrix(rows, cols, std::move(entries));
}

DenseVector read_vector(std::istream& is) {
  const std::size_t n = parse_count(is, "read_vector");
  std::vector<double> entries(n);
  for (std::size_t i = 0; i < n; ++i) entries[i] = next_value(is, "read_vector");
  return DenseVector(std::move(entries));
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open for reading: " + path);
  return is;
}

}  // namespace

void write_matrix_file(const std::string& path, const DenseMatrix& m) {
  auto os = open_out(path);
  write_matrix(os, m);
  if (!os) throw IoError("write failed: " + path);
}

void write_vector_file(const std::string& path, const DenseVector& v) {
  auto os = open_out(path);
  write_vector(os, v);
  if (!os) throw IoError("write failed: " + path);
}

DenseMatrix read_matrix_file(const std::string& path) {
  auto is = open_in(path);
  return read_matrix(is);
}

DenseVector read_vector_file(const std::string& path) {
  auto is = open_in(path);
  return read_vector(is);
}

}  // namespace atomprune
