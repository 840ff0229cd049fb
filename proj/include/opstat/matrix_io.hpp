#pragma once

#include <string>

#include "opstat/complex_matrix.hpp"

namespace opstat {

// Operator file format:
//   {"dim": n, "re": [[...]], "im": [[...]]}
// with row-major n x n arrays. Rectangular matrices (Kraus blocks) use
// "rows"/"cols" in place of "dim". The reader validates shape and finiteness
// and names the offending field in error messages.
ComplexMatrix matrix_from_json_text(const std::string& text);
ComplexMatrix matrix_from_json_file(const std::string& path);
std::string matrix_to_json_text(const ComplexMatrix& m);
void matrix_to_json_file(const ComplexMatrix& m, const std::string& path);

}  // namespace opstat
