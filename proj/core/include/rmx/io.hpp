#pragma once

#include <iosfwd>
#include <string>

#include "rmx/matrix.hpp"

namespace rmx {

/// Matrix files: first line "rows cols", then row-major whitespace-separated
/// values.  Vectors are 1-column matrices.  Parse errors carry line numbers.
DenseMatrix read_matrix(std::istream& is, const std::string& name = "<stream>");
DenseMatrix read_matrix_file(const std::string& path);
void write_matrix(std::ostream& os, const DenseMatrix& a);
void write_matrix_file(const std::string& path, const DenseMatrix& a);

Vec read_vector_file(const std::string& path);
void write_vector_file(const std::string& path, const Vec& v);

}  // namespace rmx
