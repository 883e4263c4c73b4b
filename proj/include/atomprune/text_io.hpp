#pragma once

#include <iosfwd>
#include <string>

#include "atomprune/dense.hpp"

namespace atomprune {

/// One value, 17 significant digits, scientific notation. Round-trips through
/// read_* exactly.
std::string format_value(double v);

/// Matrix text format: first line "rows cols", then one whitespace-separated
/// row per line. Vector format: "length" on the first line, one value per
/// line.
void write_matrix(std::ostream& os, const DenseMatrix& m);
void write_vector(std::ostream& os, const DenseVector& v);
DenseMatrix read_matrix(std::istream& is);
DenseVector read_vector(std::istream& is);

void write_matrix_file(const std::string& path, const DenseMatrix& m);
void write_vector_file(const std::string& path, const DenseVector& v);
DenseMatrix read_matrix_file(const std::string& path);
DenseVector read_vector_file(const std::string& path);

}  // namespace atomprune
