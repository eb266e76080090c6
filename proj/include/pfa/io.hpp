#pragma once

#include "pfa/types.hpp"

#include <string>

namespace pfa::io {

/// Rectangular numeric CSV, no header unless `header` (then row 1 is
/// skipped). Cells must parse as finite decimal doubles; errors carry
/// 1-based row/column coordinates.
Matrix read_matrix_csv(const std::string& path, bool header = false);

/// Single-column CSV (one value per row).
Vector read_vector_csv(const std::string& path, bool header = false);

/// 17-significant-digit formatting, round-trip exact for doubles.
std::string format_double(double value);

/// Writes via a temp file and rename, so readers never observe partial output.
void write_text_atomic(const std::string& path, const std::string& content);

void write_matrix_csv(const std::string& path, const Matrix& m);
void write_vector_csv(const std::string& path, const Vector& v);

}  // namespace pfa::io
