#include "spectral/linalg.hpp"

#include <lapacke.h>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace spectral {

namespace {

void check_dims(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("matrix dimensions must be positive");
  if (cols != 0 && rows > std::numeric_limits<std::size_t>::max() / cols)
    throw std::overflow_error("matrix dimensions overflow");
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
  check_dims(rows, cols);
  data_.assign(rows * cols, 0.0);
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  check_dims(rows, cols);
  if (data_.size() != rows * cols) throw std::invalid_argument("entry count does not match dimensions");
  for (double v : data_)
    if (!std::isfinite(v)) throw std::invalid_argument("matrix entries must be finite");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix I(n, n);
  for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
  return I;
}

DenseMatrix DenseMatrix::diagonal(const RealVector& d) {
  DenseMatrix D(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) D(i, i) = d[i];
  return D;
}

DenseMatrix& DenseMatrix::operator*=(double c) {
  if (!std::isfinite(c)) throw std::invalid_argument("scale factor must be finite");
  for (double& v : data_) v *= c;
  return *this;
}

void ensure_finite(const RealVector& v, const std::string& what) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument(what + " contains a non-finite entry");
}

SingularSystem svd(const DenseMatrix& K, double rank_tol) {
  if (rank_tol < 0.0) throw std::invalid_argument("rank_tol must be nonnegative");
  const auto m = K.rows(), n = K.cols();
  const std::size_t r_full = std::min(m, n);

  std::vector<double> a(K.entries());  // dgesdd destroys its input
  std::vector<double> s(r_full);
  DenseMatrix U(m, r_full), VT(r_full, n);

  lapack_int info = LAPACKE_dgesdd(LAPACK_ROW_MAJOR, 'S', static_cast<lapack_int>(m),
                                   static_cast<lapack_int>(n), a.data(), static_cast<lapack_int>(n),
                                   s.data(), U.data(), static_cast<lapack_int>(r_full), VT.data(),
                                   static_cast<lapack_int>(n));
  if (info > 0) throw std::runtime_error("svd: dgesdd did not converge");
  if (info < 0) throw std::runtime_error("svd: dgesdd reported an invalid argument");

  std::size_t r = 0;
  while (r < r_full && s[r] > rank_tol) ++r;

  SingularSystem out;
  out.rank_tol = rank_tol;
  out.sigma.assign(s.begin(), s.begin() + r);
  if (r == 0) return out;
  out.U = DenseMatrix(m, r);
  out.V = DenseMatrix(n, r);
  for (std::size_t k = 0; k < r; ++k) {
    // first exactly-nonzero entry of v_k decides the joint sign flip
    double flip = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (VT(k, j) != 0.0) {
        flip = VT(k, j) < 0.0 ? -1.0 : 1.0;
        break;
      }
    }
    for (std::size_t j = 0; j < n; ++j) out.V(j, k) = flip * VT(k, j);
    for (std::size_t i = 0; i < m; ++i) out.U(i, k) = flip * U(i, k);
  }
  return out;
}

SingularSystem svd(const DenseMatrix& K) {
  // probe sigma_max cheaply through the full factorization anyway; rank_tol
  // needs it, so compute once with tol 0 and re-truncate
  SingularSystem full = svd(K, 0.0);
  if (full.rank() == 0) return full;
  const double eps = std::numeric_limits<double>::epsilon();
  const double tol = static_cast<double>(std::max(K.rows(), K.cols())) * eps * full.sigma.front();
  std::size_t r = 0;
  while (r < full.rank() && full.sigma[r] > tol) ++r;
  if (r == full.rank()) {
    full.rank_tol = tol;
    return full;
  }
  SingularSystem out;
  out.rank_tol = tol;
  out.sigma.assign(full.sigma.begin(), full.sigma.begin() + r);
  if (r == 0) return out;
  out.U = DenseMatrix(K.rows(), r);
  out.V = DenseMatrix(K.cols(), r);
  for (std::size_t k = 0; k < r; ++k) {
    for (std::size_t i = 0; i < K.rows(); ++i) out.U(i, k) = full.U(i, k);
    for (std::size_t j = 0; j < K.cols(); ++j) out.V(j, k) = full.V(j, k);
  }
  return out;
}

DenseMatrix kron(const DenseMatrix& A, const DenseMatrix& B) {
  const std::size_t max_dim = std::numeric_limits<std::size_t>::max();
  if (A.rows() > max_dim / B.rows() || A.cols() > max_dim / B.cols())
    throw std::overflow_error("kron: result dimensions overflow");
  const std::size_t R = A.rows() * B.rows(), C = A.cols() * B.cols();
  if (R > max_dim / C) throw std::overflow_error("kron: result size overflows");
  DenseMatrix out(R, C);
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) {
      const double a = A(i, j);
      if (a == 0.0) continue;
      for (std::size_t p = 0; p < B.rows(); ++p)
        for (std::size_t q = 0; q < B.cols(); ++q)
          out(i * B.rows() + p, j * B.cols() + q) = a * B(p, q);
    }
  return out;
}

DenseMatrix symmetric_banded_toeplitz(const RealVector& first_row) {
  if (first_row.empty()) throw std::invalid_argument("symmetric_banded_toeplitz: first_row is empty");
  ensure_finite(first_row, "first_row");
  const std::size_t n = first_row.size();
  DenseMatrix T(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) T(i, j) = first_row[i > j ? i - j : j - i];
  return T;
}

double cond2(const SingularSystem& S) {
  if (S.rank() == 0) throw std::invalid_argument("cond2: no retained singular values");
  return S.sigma.front() / S.sigma.back();
}

double fro_norm(const DenseMatrix& A) {
  double acc = 0.0;
  for (double v : A.entries()) acc += v * v;
  return std::sqrt(acc);
}

double two_norm(const RealVector& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

RealVector matvec(const DenseMatrix& A, const RealVector& x) {
  if (x.size() != A.cols()) throw std::invalid_argument("matvec: dimension mismatch");
  RealVector y(A.rows());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    const double* row = A.data() + i * A.cols();
    double acc = 0.0;
    for (std::size_t j = 0; j < A.cols(); ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
  return y;
}

RealVector matvec_transpose(const DenseMatrix& A, const RealVector& y) {
  if (y.size() != A.rows()) throw std::invalid_argument("matvec_transpose: dimension mismatch");
  RealVector x(A.cols(), 0.0);
  for (std::size_t i = 0; i < A.rows(); ++i) {
    const double* row = A.data() + i * A.cols();
    const double yi = y[i];
    for (std::size_t j = 0; j < A.cols(); ++j) x[j] += row[j] * yi;
  }
  return x;
}

DenseMatrix matmul(const DenseMatrix& A, const DenseMatrix& B) {
  if (A.cols() != B.rows()) throw std::invalid_argument("matmul: dimension mismatch");
  DenseMatrix C(A.rows(), B.cols());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t k = 0; k < A.cols(); ++k) {
      const double a = A(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < B.cols(); ++j) C(i, j) += a * B(k, j);
    }
  return C;
}

DenseMatrix transpose(const DenseMatrix& A) {
  DenseMatrix T(A.cols(), A.rows());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) T(j, i) = A(i, j);
  return T;
}

RealVector add(const RealVector& a, const RealVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("add: dimension mismatch");
  RealVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

RealVector sub(const RealVector& a, const RealVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("sub: dimension mismatch");
  RealVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

RealVector scale(const RealVector& a, double c) {
  RealVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = c * a[i];
  return out;
}

double dot(const RealVector& a, const RealVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace spectral
