#pragma once

#include <filesystem>

#include "spectral/linalg.hpp"

namespace spectral {

// Matrix/vector files: one header line "rows,cols", then one line per row of
// comma-separated entries printed with 17 significant digits (round-trip
// exact for doubles). Vectors are stored as single-column matrices.

void write_matrix_csv(const std::filesystem::path& path, const DenseMatrix& M);
DenseMatrix read_matrix_csv(const std::filesystem::path& path);

void write_vector_csv(const std::filesystem::path& path, const RealVector& v);
RealVector read_vector_csv(const std::filesystem::path& path);

std::string format_double(double v);  // %.17g

}  // namespace spectral
