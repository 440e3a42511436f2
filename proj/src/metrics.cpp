#include "spectral/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace spectral {

double rerror(const RealVector& x_hat, const RealVector& x_true) {
  if (x_hat.size() != x_true.size()) throw std::invalid_argument("rerror: dimension mismatch");
  const double denom = two_norm(x_true);
  if (!(denom > 0.0)) throw std::invalid_argument("rerror: x_true is zero");
  return two_norm(sub(x_hat, x_true)) / denom;
}

bool success(double rerror_value, double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("success: threshold must be positive");
  return rerror_value <= threshold;
}

double success_probability(const std::vector<Metrics>& trials) {
  if (trials.empty()) throw std::invalid_argument("success_probability: no trials");
  std::size_t hits = 0;
  for (const Metrics& m : trials) hits += m.success;
  return static_cast<double>(hits) / static_cast<double>(trials.size());
}

void DiscrepancyRule::validate() const {
  if (!(tau_d > 0.0)) throw std::invalid_argument("DiscrepancyRule: tau_d must be positive");
  if (!(grid_lo < grid_hi)) throw std::invalid_argument("DiscrepancyRule: grid_lo must be < grid_hi");
  if (!(grid_lo > 0.0)) throw std::invalid_argument("DiscrepancyRule: grid_lo must be positive");
  if (grid_points < 2) throw std::invalid_argument("DiscrepancyRule: need at least 2 grid points");
}

std::vector<double> DiscrepancyRule::grid(double delta) const {
  validate();
  if (!(delta > 0.0)) throw std::invalid_argument("DiscrepancyRule: delta must be positive");
  const double lo = std::log(grid_lo * delta), hi = std::log(grid_hi * delta);
  std::vector<double> out(grid_points);
  for (int i = 0; i < grid_points; ++i)
    out[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / (grid_points - 1));
  return out;
}

AlphaSelection select_alpha_discrepancy(const std::function<RealVector(double)>& solve,
                                        const DenseMatrix& K, const RealVector& y_noisy,
                                        double delta, const DiscrepancyRule& rule) {
  const std::vector<double> grid = rule.grid(delta);
  const double target = rule.tau_d * delta;
  for (double alpha : grid) {
    RealVector x_hat = solve(alpha);
    ensure_finite(x_hat, "discrepancy solver output");
    const double residual = two_norm(sub(matvec(K, x_hat), y_noisy));
    if (residual >= target) return {alpha, false};
  }
  return {grid.back(), true};
}

AlphaRule AlphaRule::fixed(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("AlphaRule: fixed alpha must be positive");
  AlphaRule r;
  r.kind = Kind::fixed;
  r.alpha = alpha;
  return r;
}

AlphaRule AlphaRule::oder_delta(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("AlphaRule: c must be positive");
  AlphaRule r;
  r.kind = Kind::oder_delta;
  r.c = c;
  return r;
}

AlphaRule AlphaRule::discrepancy_rule(DiscrepancyRule rule) {
  rule.validate();
  AlphaRule r;
  r.kind = Kind::discrepancy;
  r.discrepancy = rule;
  return r;
}

AlphaRule AlphaRule::rate_two_thirds(double c, double E) {
  if (!(c > 0.0) || !(E > 0.0)) throw std::invalid_argument("AlphaRule: constants must be positive");
  AlphaRule r;
  r.kind = Kind::rate_two_thirds;
  r.c = c;
  r.E = E;
  return r;
}

AlphaRule AlphaRule::rate_one_half(double c, double E) {
  if (!(c > 0.0) || !(E > 0.0)) throw std::invalid_argument("AlphaRule: constants must be positive");
  AlphaRule r;
  r.kind = Kind::rate_one_half;
  r.c = c;
  r.E = E;
  return r;
}

double AlphaRule::resolve(double delta) const {
  switch (kind) {
    case Kind::fixed:
      return alpha;
    case Kind::oder_delta:
      if (!(delta > 0.0)) throw std::invalid_argument("AlphaRule: delta must be positive");
      return c * delta;
    case Kind::rate_two_thirds:
      if (!(delta > 0.0)) throw std::invalid_argument("AlphaRule: delta must be positive");
      return c * std::pow(delta / E, 2.0 / 3.0);
    case Kind::rate_one_half:
      if (!(delta > 0.0)) throw std::invalid_argument("AlphaRule: delta must be positive");
      return c * std::sqrt(delta / E);
    case Kind::discrepancy:
      throw std::logic_error("AlphaRule: discrepancy needs a solver, use select_alpha_discrepancy");
  }
  throw std::logic_error("AlphaRule: unknown kind");
}

LogLogFit fit_loglog(const std::vector<double>& deltas, const std::vector<double>& errors) {
  if (deltas.size() != errors.size() || deltas.size() < 2)
    throw std::invalid_argument("fit_loglog: need matching lists with >= 2 points");
  const std::size_t n = deltas.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(deltas[i] > 0.0) || !(errors[i] > 0.0))
      throw std::invalid_argument("fit_loglog: values must be positive");
    lx[i] = std::log(deltas[i]);
    ly[i] = std::log(errors[i]);
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double dn = static_cast<double>(n);
  const double denom = dn * sxx - sx * sx;
  LogLogFit fit;
  fit.slope = (dn * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / dn;
  double ss_res = 0, ss_tot = 0;
  const double mean_y = sy / dn;
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = fit.slope * lx[i] + fit.intercept;
    ss_res += (ly[i] - pred) * (ly[i] - pred);
    ss_tot += (ly[i] - mean_y) * (ly[i] - mean_y);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace spectral
