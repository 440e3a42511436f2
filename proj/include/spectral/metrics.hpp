#pragma once

#include <chrono>
#include <functional>
#include <utility>
#include <vector>

#include "spectral/linalg.hpp"

namespace spectral {

struct Metrics {
  double rerror = 0.0;
  double wall_time_ms = 0.0;
  long iterations = 0;
  bool success = false;
};

/// ||x_hat - x_true|| / ||x_true||.
double rerror(const RealVector& x_hat, const RealVector& x_true);

/// Inclusive comparison: rerror <= threshold counts as success.
bool success(double rerror_value, double threshold);

double success_probability(const std::vector<Metrics>& trials);

/// Geometric alpha grid for the discrepancy principle, relative to delta.
struct DiscrepancyRule {
  double tau_d = 1.01;
  double grid_lo = 1e-8;  // multiplies delta
  double grid_hi = 1e2;   // multiplies delta
  int grid_points = 40;

  void validate() const;
  std::vector<double> grid(double delta) const;  // ascending
};

struct AlphaSelection {
  double alpha = 0.0;
  bool hit_boundary = false;  // no grid point met the residual target
};

/// Smallest grid alpha whose residual ||K x_hat(alpha) - y_noisy|| reaches
/// tau_d * delta; grid_hi with the flag set when none qualifies.
AlphaSelection select_alpha_discrepancy(const std::function<RealVector(double)>& solve,
                                        const DenseMatrix& K, const RealVector& y_noisy,
                                        double delta, const DiscrepancyRule& rule = {});

/// How the regularization parameter is produced from the noise level.
struct AlphaRule {
  enum class Kind { fixed, oder_delta, discrepancy, rate_two_thirds, rate_one_half };

  Kind kind = Kind::oder_delta;
  double alpha = 0.0;  // fixed
  double c = 0.003;    // scale for the delta-driven rules
  double E = 1.0;      // source-strength constant for the rate rules
  DiscrepancyRule discrepancy;

  static AlphaRule fixed(double alpha);
  static AlphaRule oder_delta(double c = 0.003);
  static AlphaRule discrepancy_rule(DiscrepancyRule rule = {});
  static AlphaRule rate_two_thirds(double c, double E);
  static AlphaRule rate_one_half(double c, double E);

  /// Resolve the delta-driven kinds; Kind::discrepancy needs a solver and is
  /// resolved by the caller through select_alpha_discrepancy.
  double resolve(double delta) const;
};

template <class F>
auto timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  auto result = std::forward<F>(f)();
  const auto t1 = std::chrono::steady_clock::now();
  const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return std::pair<decltype(result), double>{std::move(result), ms};
}

/// Least-squares slope (and R^2) of log(err) against log(delta).
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
LogLogFit fit_loglog(const std::vector<double>& deltas, const std::vector<double>& errors);

}  // namespace spectral
