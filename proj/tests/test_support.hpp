#pragma once

// Shared helpers for the test suites: controlled-spectrum matrix builders and
// independent brute-force oracles. Everything here is implementation-agnostic
// on purpose; tests compare library output against these.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "spectral/linalg.hpp"
#include "spectral/rng.hpp"

namespace testsupport {

using spectral::DenseMatrix;
using spectral::RealVector;

inline DenseMatrix random_matrix(std::size_t m, std::size_t n, std::uint64_t seed,
                                 double scale = 1.0) {
  spectral::SplitMix64 rng(seed);
  std::vector<double> entries(m * n);
  for (double& v : entries) v = scale * rng.next_normal();
  return DenseMatrix(m, n, std::move(entries));
}

/// Orthonormal n x n matrix from Gram-Schmidt on a seeded Gaussian draw.
inline DenseMatrix random_orthogonal(std::size_t n, std::uint64_t seed) {
  DenseMatrix A = random_matrix(n, n, seed);
  DenseMatrix Q(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    RealVector col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = A(i, k);
    for (std::size_t prev = 0; prev < k; ++prev) {
      double proj = 0.0;
      for (std::size_t i = 0; i < n; ++i) proj += Q(i, prev) * col[i];
      for (std::size_t i = 0; i < n; ++i) col[i] -= proj * Q(i, prev);
    }
    const double nrm = spectral::two_norm(col);
    if (!(nrm > 1e-12)) throw std::runtime_error("degenerate Gram-Schmidt draw");
    for (std::size_t i = 0; i < n; ++i) Q(i, k) = col[i] / nrm;
  }
  return Q;
}

/// K = U diag(sigma) V^T with orthogonal factors; gives full spectral control.
inline DenseMatrix matrix_with_spectrum(const RealVector& sigma, std::uint64_t seed) {
  const std::size_t n = sigma.size();
  DenseMatrix U = random_orthogonal(n, seed);
  DenseMatrix V = random_orthogonal(n, seed + 1);
  DenseMatrix K(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += U(i, k) * sigma[k] * V(j, k);
      K(i, j) = acc;
    }
  return K;
}

inline double max_abs_diff(const DenseMatrix& A, const DenseMatrix& B) {
  double worst = 0.0;
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) worst = std::max(worst, std::fabs(A(i, j) - B(i, j)));
  return worst;
}

inline double max_abs_diff(const RealVector& a, const RealVector& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::fabs(a[i] - b[i]));
  return worst;
}

/// 1-D minimizer by coarse grid plus golden-section refinement. Used as an
/// oracle against closed-form scalar solutions.
inline double brute_force_min_1d(const std::function<double(double)>& f, double lo, double hi,
                                 int coarse = 4001) {
  double best_x = lo, best_f = f(lo);
  for (int i = 1; i < coarse; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / (coarse - 1);
    const double fx = f(x);
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  const double step = (hi - lo) / (coarse - 1);
  double a = best_x - step, b = best_x + step;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  for (int it = 0; it < 200; ++it) {
    if (f(c) < f(d))
      b = d;
    else
      a = c;
    c = b - gr * (b - a);
    d = a + gr * (b - a);
  }
  return 0.5 * (a + b);
}

/// Objective of the coordinatewise fidelity plus l1 penalty for diagonal
/// operators, evaluated directly from its definition.
inline double diag_l1_objective(const RealVector& sigma, const RealVector& y, const RealVector& x,
                                double alpha) {
  double acc = 0.0;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    const double r = sigma[i] * x[i] - y[i];
    acc += r * r + alpha * std::fabs(x[i]);
  }
  return acc;
}

}  // namespace testsupport
