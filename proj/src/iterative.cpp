#include "spectral/iterative.hpp"

#include <cmath>
#include <stdexcept>

#include "spectral/thresholding.hpp"

namespace spectral {

namespace {

/// Lower bound on sigma_max: max column norm and one power-method Rayleigh
/// step from the all-ones vector. Never rejects a properly scaled operator;
/// catches the typical "forgot to scale" case where sigma_max >> 1.
double sigma_max_lower_bound(const DenseMatrix& K) {
  double max_col = 0.0;
  RealVector col_sq(K.cols(), 0.0);
  for (std::size_t i = 0; i < K.rows(); ++i)
    for (std::size_t j = 0; j < K.cols(); ++j) col_sq[j] += K(i, j) * K(i, j);
  for (double v : col_sq) max_col = std::max(max_col, v);

  RealVector ones(K.cols(), 1.0);
  RealVector w = matvec_transpose(K, matvec(K, ones));
  const double nw = two_norm(w);
  const double rayleigh = nw > 0.0 ? dot(ones, w) / dot(ones, ones) : 0.0;
  return std::sqrt(std::max(max_col, std::max(rayleigh, 0.0)));
}

void check_scaled(const DenseMatrix& K) {
  if (sigma_max_lower_bound(K) >= 1.0)
    throw std::invalid_argument("iterative solver: operator norm is >= 1, scale the operator first");
}

double l1_penalty(const RealVector& x) {
  double acc = 0.0;
  for (double v : x) acc += std::fabs(v);
  return acc;
}

double sqrt_penalty(const RealVector& x) {
  double acc = 0.0;
  for (double v : x) acc += std::sqrt(std::fabs(v));
  return acc;
}

struct StepWorkspace {
  RealVector residual;
  RealVector grad;
};

/// z - K^T (K z - y); also records ||K z - y||^2 for the objective history.
RealVector gradient_step(const DenseMatrix& K, const RealVector& y, const RealVector& z, double mu,
                         StepWorkspace& ws, double& fidelity_sq) {
  ws.residual = matvec(K, z);
  for (std::size_t i = 0; i < ws.residual.size(); ++i) ws.residual[i] -= y[i];
  fidelity_sq = dot(ws.residual, ws.residual);
  ws.grad = matvec_transpose(K, ws.residual);
  RealVector out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] - mu * ws.grad[i];
  return out;
}

double relative_change(const RealVector& x_new, const RealVector& x_old) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x_new.size(); ++i) {
    const double d = x_new[i] - x_old[i];
    num += d * d;
    den += x_old[i] * x_old[i];
  }
  return std::sqrt(num) / std::max(1.0, std::sqrt(den));
}

void check_solver_inputs(const DenseMatrix& K, const RealVector& y, const IterativeSpec& spec,
                         const RealVector& x0) {
  spec.validate();
  if (y.size() != K.rows()) throw std::invalid_argument("iterative solver: data dimension mismatch");
  if (x0.size() != K.cols()) throw std::invalid_argument("iterative solver: x0 dimension mismatch");
  check_scaled(K);
}

}  // namespace

void IterativeSpec::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("IterativeSpec: alpha must be positive");
  if (max_iters < 1) throw std::invalid_argument("IterativeSpec: max_iters must be >= 1");
  if (!(rel_change_tol > 0.0)) throw std::invalid_argument("IterativeSpec: rel_change_tol must be positive");
  if (step_scale < 0.0) throw std::invalid_argument("IterativeSpec: step_scale must be nonnegative");
}

std::pair<DenseMatrix, double> scale_operator(const DenseMatrix& K) {
  SingularSystem S = svd(K);
  if (S.rank() == 0) throw std::invalid_argument("scale_operator: zero operator");
  return scale_operator(K, S.sigma.front());
}

std::pair<DenseMatrix, double> scale_operator(const DenseMatrix& K, double sigma_max) {
  if (!(sigma_max > 0.0)) throw std::invalid_argument("scale_operator: zero operator");
  const double c = sigma_max >= 1.0 ? 0.99 / sigma_max : 1.0;
  DenseMatrix scaled = K;
  scaled *= c;
  return {std::move(scaled), c};
}

double fista_momentum_next(double t) { return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t)); }

double iterative_objective(IterativeAlgorithm alg, const DenseMatrix& K, const RealVector& y,
                           const RealVector& x, double alpha) {
  RealVector r = matvec(K, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= y[i];
  const double fid = dot(r, r);
  return fid + alpha * (alg == IterativeAlgorithm::pg_half ? sqrt_penalty(x) : l1_penalty(x));
}

std::pair<RealVector, IterateTrace> ista(const DenseMatrix& K, const RealVector& y,
                                         const IterativeSpec& spec, const RealVector& x0) {
  check_solver_inputs(K, y, spec, x0);
  RealVector x = x0;
  IterateTrace trace;
  trace.objective_history.reserve(spec.max_iters);
  StepWorkspace ws;
  for (int it = 1; it <= spec.max_iters; ++it) {
    double fid = 0.0;
    RealVector x_new = gradient_step(K, y, x, 1.0, ws, fid);
    for (double& v : x_new) v = soft_threshold(v, spec.alpha);
    trace.objective_history.push_back(fid + spec.alpha * l1_penalty(x));
    const double rel = relative_change(x_new, x);
    x = std::move(x_new);
    trace.iterations_run = it;
    if (rel < spec.rel_change_tol) {
      trace.converged = true;
      break;
    }
  }
  ensure_finite(x, "ista iterate");
  return {std::move(x), std::move(trace)};
}

std::pair<RealVector, IterateTrace> fista(const DenseMatrix& K, const RealVector& y,
                                          const IterativeSpec& spec, const RealVector& x0) {
  check_solver_inputs(K, y, spec, x0);
  RealVector x = x0;
  RealVector x_prev = x0;
  double t = 1.0;
  IterateTrace trace;
  trace.objective_history.reserve(spec.max_iters);
  StepWorkspace ws;
  for (int it = 1; it <= spec.max_iters; ++it) {
    const double t_next = fista_momentum_next(t);
    const double beta = (t - 1.0) / t_next;
    RealVector z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + beta * (x[i] - x_prev[i]);
    double fid = 0.0;
    RealVector x_new = gradient_step(K, y, z, 1.0, ws, fid);
    for (double& v : x_new) v = soft_threshold(v, spec.alpha);
    trace.objective_history.push_back(iterative_objective(IterativeAlgorithm::fista, K, y, x, spec.alpha));
    const double rel = relative_change(x_new, x);
    x_prev = std::move(x);
    x = std::move(x_new);
    t = t_next;
    trace.iterations_run = it;
    if (rel < spec.rel_change_tol) {
      trace.converged = true;
      break;
    }
  }
  ensure_finite(x, "fista iterate");
  return {std::move(x), std::move(trace)};
}

std::pair<RealVector, IterateTrace> pg_half(const DenseMatrix& K, const RealVector& y,
                                            const IterativeSpec& spec, const RealVector& x0) {
  check_solver_inputs(K, y, spec, x0);
  double mu = spec.step_scale;
  if (mu == 0.0) {
    SingularSystem S = svd(K);
    if (S.rank() == 0) throw std::invalid_argument("pg_half: zero operator");
    mu = 0.99 / (S.sigma.front() * S.sigma.front());
  }
  RealVector x = x0;
  IterateTrace trace;
  trace.objective_history.reserve(spec.max_iters);
  StepWorkspace ws;
  for (int it = 1; it <= spec.max_iters; ++it) {
    double fid = 0.0;
    RealVector x_new = gradient_step(K, y, x, mu, ws, fid);
    for (double& v : x_new) v = half_threshold(v, mu * spec.alpha, 1.0);
    trace.objective_history.push_back(fid + spec.alpha * sqrt_penalty(x));
    const double rel = relative_change(x_new, x);
    x = std::move(x_new);
    trace.iterations_run = it;
    if (rel < spec.rel_change_tol) {
      trace.converged = true;
      break;
    }
  }
  ensure_finite(x, "pg_half iterate");
  return {std::move(x), std::move(trace)};
}

std::pair<RealVector, IterateTrace> run_iterative(const DenseMatrix& K, const RealVector& y,
                                                  const IterativeSpec& spec, const RealVector& x0) {
  switch (spec.algorithm) {
    case IterativeAlgorithm::ista:
      return ista(K, y, spec, x0);
    case IterativeAlgorithm::fista:
      return fista(K, y, spec, x0);
    case IterativeAlgorithm::pg_half:
      return pg_half(K, y, spec, x0);
  }
  throw std::invalid_argument("run_iterative: unknown algorithm");
}

}  // namespace spectral
