#include "spectral/thresholding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spectral {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

ThresholdParams::ThresholdParams(double alpha_, double sigma_n_) : alpha(alpha_), sigma_n(sigma_n_) {
  if (!(alpha > 0.0)) throw std::invalid_argument("ThresholdParams: alpha must be positive");
  if (!(sigma_n > 0.0)) throw std::invalid_argument("ThresholdParams: sigma_n must be positive");
}

double soft_threshold(double t, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("soft_threshold: alpha must be positive");
  const double half = 0.5 * alpha;
  if (t >= half) return t - half;
  if (t <= -half) return t + half;
  return 0.0;
}

double half_threshold_boundary(double alpha) { return 0.75 * std::cbrt(alpha * alpha); }

double half_threshold(double t, double alpha, double sigma_n) {
  if (!(alpha > 0.0)) throw std::invalid_argument("half_threshold: alpha must be positive");
  if (!(sigma_n > 0.0)) throw std::invalid_argument("half_threshold: sigma_n must be positive");
  const double at = std::fabs(t);
  if (at <= half_threshold_boundary(alpha)) return 0.0;
  // the arccos argument is analytically in (0, 1] here; clamp against rounding
  double arg = (alpha / 8.0) * std::pow(at / 3.0, -1.5);
  arg = std::clamp(arg, 1e-16 - 1.0, 1.0);
  const double phi = std::acos(arg);
  const double sigma43 = std::pow(sigma_n, 4.0 / 3.0);
  return (2.0 / (3.0 * sigma43)) * t * (1.0 + std::cos(2.0 * kPi / 3.0 - (2.0 / 3.0) * phi));
}

double classical_filter(FilterKind kind, double alpha, double sigma) {
  if (!(alpha > 0.0)) throw std::invalid_argument("classical_filter: alpha must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("classical_filter: sigma must be positive");
  switch (kind) {
    case FilterKind::tikhonov: {
      const double s2 = sigma * sigma;
      return s2 / (alpha + s2);
    }
    case FilterKind::landweber: {
      const double u = alpha * sigma * sigma;
      if (u >= 1.0) return 1.0;  // base clamped at 0
      // (1-u)^(1/alpha) in log space via log1p: no overflow for tiny alpha
      // and no cancellation when u is near the rounding floor of 1
      return 1.0 - std::exp(std::log1p(-u) / alpha);
    }
    case FilterKind::tsvd:
      return sigma * sigma >= alpha ? 1.0 : 0.0;
  }
  throw std::invalid_argument("classical_filter: unknown kind");
}

}  // namespace spectral
