#include "spectral/recovery.hpp"

#include <cmath>
#include <stdexcept>

namespace spectral {

namespace {

void check_inputs(const SingularSystem& S, const RealVector& y) {
  if (S.rank() == 0) throw std::invalid_argument("recovery: empty singular system");
  if (y.size() != S.U.rows()) throw std::invalid_argument("recovery: data dimension mismatch");
}

/// Coefficients of y in the left singular basis: c_n = <y, u_n>.
RealVector left_coefficients(const SingularSystem& S, const RealVector& y) {
  const std::size_t m = S.U.rows(), r = S.rank();
  RealVector c(r, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double yi = y[i];
    const double* row = S.U.data() + i * r;
    for (std::size_t k = 0; k < r; ++k) c[k] += row[k] * yi;
  }
  return c;
}

/// x = sum_k w_k v_k.
RealVector expand_right(const SingularSystem& S, const RealVector& w) {
  const std::size_t n = S.V.rows(), r = S.rank();
  RealVector x(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double* row = S.V.data() + j * r;
    double acc = 0.0;
    for (std::size_t k = 0; k < r; ++k) acc += row[k] * w[k];
    x[j] = acc;
  }
  return x;
}

}  // namespace

SpectralMethod SpectralMethod::naive() { return {Tag::naive, FilterKind::tikhonov, 0.0}; }

SpectralMethod SpectralMethod::filtered(FilterKind kind, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("SpectralMethod: alpha must be positive");
  return {Tag::filtered, kind, alpha};
}

SpectralMethod SpectralMethod::l1(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("SpectralMethod: alpha must be positive");
  return {Tag::l1_svd, FilterKind::tikhonov, alpha};
}

SpectralMethod SpectralMethod::l_half(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("SpectralMethod: alpha must be positive");
  return {Tag::l_half_svd, FilterKind::tikhonov, alpha};
}

RealVector naive_inverse(const SingularSystem& S, const RealVector& y) {
  check_inputs(S, y);
  RealVector w = left_coefficients(S, y);
  for (std::size_t k = 0; k < w.size(); ++k) w[k] /= S.sigma[k];
  return expand_right(S, w);
}

RealVector filtered_inverse(const SingularSystem& S, const RealVector& y, FilterKind kind,
                            double alpha) {
  check_inputs(S, y);
  RealVector w = left_coefficients(S, y);
  for (std::size_t k = 0; k < w.size(); ++k)
    w[k] *= classical_filter(kind, alpha, S.sigma[k]) / S.sigma[k];
  return expand_right(S, w);
}

RealVector l1_svd(const SingularSystem& S, const RealVector& y, double alpha) {
  check_inputs(S, y);
  if (!(alpha > 0.0)) throw std::invalid_argument("l1_svd: alpha must be positive");
  RealVector w = left_coefficients(S, y);
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double s = S.sigma[k];
    w[k] = soft_threshold(s * w[k], alpha) / (s * s);
  }
  return expand_right(S, w);
}

RealVector l_half_svd(const SingularSystem& S, const RealVector& y, double alpha) {
  check_inputs(S, y);
  if (!(alpha > 0.0)) throw std::invalid_argument("l_half_svd: alpha must be positive");
  RealVector w = left_coefficients(S, y);
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double s = S.sigma[k];
    w[k] = half_threshold(std::cbrt(s) * w[k], alpha, s);
  }
  return expand_right(S, w);
}

RealVector recover(const SingularSystem& S, const RealVector& y, const SpectralMethod& method) {
  switch (method.tag) {
    case SpectralMethod::Tag::naive:
      return naive_inverse(S, y);
    case SpectralMethod::Tag::filtered:
      return filtered_inverse(S, y, method.filter, method.alpha);
    case SpectralMethod::Tag::l1_svd:
      return l1_svd(S, y, method.alpha);
    case SpectralMethod::Tag::l_half_svd:
      return l_half_svd(S, y, method.alpha);
  }
  throw std::invalid_argument("recover: unknown method");
}

}  // namespace spectral
