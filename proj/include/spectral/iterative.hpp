#pragma once

#include <utility>
#include <vector>

#include "spectral/linalg.hpp"

namespace spectral {

enum class IterativeAlgorithm { ista, fista, pg_half };

struct IterativeSpec {
  IterativeAlgorithm algorithm = IterativeAlgorithm::ista;
  double alpha = 0.0;
  int max_iters = 2000;
  double rel_change_tol = 1e-5;
  double step_scale = 0.0;  // pg_half step; 0 selects 0.99 / sigma_max(K)^2

  void validate() const;
};

struct IterateTrace {
  int iterations_run = 0;
  std::vector<double> objective_history;  // one entry per iteration
  bool converged = false;
};

/// Rescale K so its largest singular value is 0.99 when it is >= 1; the
/// caller must scale the data vector by the same factor. Uses the dense SVD
/// for sigma_max, matching how operator norms are usually evaluated in this
/// kind of pipeline. Returns (cK, c).
std::pair<DenseMatrix, double> scale_operator(const DenseMatrix& K);
std::pair<DenseMatrix, double> scale_operator(const DenseMatrix& K, double sigma_max);

/// Fixed-point soft-thresholding iteration
///   x <- S_alpha(x - K^T (K x - y)),
/// stopping when ||x_new - x|| / max(1, ||x||) < rel_change_tol or the
/// iteration cap is reached. Requires sigma_max(K) < 1 (see scale_operator);
/// a cheap lower-bound estimate of sigma_max rejects clearly unscaled inputs.
std::pair<RealVector, IterateTrace> ista(const DenseMatrix& K, const RealVector& y,
                                         const IterativeSpec& spec, const RealVector& x0);

/// ista with Nesterov momentum: t_1 = 1, t_{k+1} = (1 + sqrt(1 + 4 t_k^2))/2,
/// extrapolation z = x_k + ((t_k - 1)/t_{k+1})(x_k - x_{k-1}).
std::pair<RealVector, IterateTrace> fista(const DenseMatrix& K, const RealVector& y,
                                          const IterativeSpec& spec, const RealVector& x0);

/// Proximal-gradient iteration for the square-root penalty:
///   x <- H_{mu alpha}(x - mu K^T (K x - y)),
/// with unit sigma prefactor inside the scalar threshold.
std::pair<RealVector, IterateTrace> pg_half(const DenseMatrix& K, const RealVector& y,
                                            const IterativeSpec& spec, const RealVector& x0);

std::pair<RealVector, IterateTrace> run_iterative(const DenseMatrix& K, const RealVector& y,
                                                  const IterativeSpec& spec, const RealVector& x0);

double fista_momentum_next(double t);

/// Objective 0.5-free form ||Kx - y||^2 + alpha * penalty(x) with penalty
/// |x|_1 for ista/fista and sum sqrt|x_i| for pg_half.
double iterative_objective(IterativeAlgorithm alg, const DenseMatrix& K, const RealVector& y,
                           const RealVector& x, double alpha);

}  // namespace spectral
