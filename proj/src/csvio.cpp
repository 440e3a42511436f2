#include "spectral/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spectral {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_matrix_csv(const std::filesystem::path& path, const DenseMatrix& M) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << M.rows() << "," << M.cols() << "\n";
  for (std::size_t i = 0; i < M.rows(); ++i) {
    for (std::size_t j = 0; j < M.cols(); ++j) {
      if (j) out << ",";
      out << format_double(M(i, j));
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

DenseMatrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty matrix file: " + path.string());
  std::size_t rows = 0, cols = 0;
  {
    std::istringstream header(line);
    char comma = 0;
    if (!(header >> rows >> comma >> cols) || comma != ',')
      throw std::runtime_error("bad header in " + path.string());
  }
  std::vector<double> entries;
  entries.reserve(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("truncated matrix file: " + path.string());
    std::istringstream row(line);
    std::string cell;
    for (std::size_t j = 0; j < cols; ++j) {
      if (!std::getline(row, cell, ',')) throw std::runtime_error("short row in " + path.string());
      entries.push_back(std::stod(cell));
    }
  }
  return DenseMatrix(rows, cols, std::move(entries));
}

void write_vector_csv(const std::filesystem::path& path, const RealVector& v) {
  write_matrix_csv(path, DenseMatrix(v.size(), 1, v));
}

RealVector read_vector_csv(const std::filesystem::path& path) {
  DenseMatrix M = read_matrix_csv(path);
  if (M.cols() != 1) throw std::runtime_error("expected a single-column vector file: " + path.string());
  return M.entries();
}

}  // namespace spectral
