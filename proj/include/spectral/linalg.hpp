#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace spectral {

using RealVector = std::vector<double>;

/// Dense real matrix, row-major, 64-bit entries. Construction rejects
/// non-finite entries and non-positive dimensions.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);  // zero-filled
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(const RealVector& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  const std::vector<double>& entries() const { return data_; }

  DenseMatrix& operator*=(double c);

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

/// Ordered singular triplets of a dense operator: sigma descending, columns of
/// U and V orthonormal, and every retained sigma strictly above rank_tol.
struct SingularSystem {
  std::vector<double> sigma;  // descending, > rank_tol
  DenseMatrix U;              // m x r, left vectors as columns
  DenseMatrix V;              // n x r, right vectors as columns
  double rank_tol = 0.0;

  std::size_t rank() const { return sigma.size(); }
};

/// Full SVD of K with triplets below rank_tol dropped. Backed by LAPACK
/// dgesdd; non-convergence raises instead of returning garbage.
/// Sign convention: the first nonzero entry of each right vector is made
/// nonnegative, with the matching left vector flipped jointly.
SingularSystem svd(const DenseMatrix& K, double rank_tol);

/// rank_tol defaulted to max(m,n) * eps * sigma_max.
SingularSystem svd(const DenseMatrix& K);

DenseMatrix kron(const DenseMatrix& A, const DenseMatrix& B);

/// Square symmetric Toeplitz matrix from its first row; the row length fixes
/// the dimension and trailing zeros encode the bandwidth.
DenseMatrix symmetric_banded_toeplitz(const RealVector& first_row);

/// sigma_max / sigma_min over retained triplets.
double cond2(const SingularSystem& S);

double fro_norm(const DenseMatrix& A);
double two_norm(const RealVector& v);
RealVector matvec(const DenseMatrix& A, const RealVector& x);
RealVector matvec_transpose(const DenseMatrix& A, const RealVector& y);

DenseMatrix matmul(const DenseMatrix& A, const DenseMatrix& B);
DenseMatrix transpose(const DenseMatrix& A);

RealVector add(const RealVector& a, const RealVector& b);
RealVector sub(const RealVector& a, const RealVector& b);
RealVector scale(const RealVector& a, double c);
double dot(const RealVector& a, const RealVector& b);

void ensure_finite(const RealVector& v, const std::string& what);

}  // namespace spectral
