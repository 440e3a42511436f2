#pragma once

#include "spectral/linalg.hpp"
#include "spectral/thresholding.hpp"

namespace spectral {

/// Which spectral reconstruction to apply to the coefficient sequence.
struct SpectralMethod {
  enum class Tag { naive, filtered, l1_svd, l_half_svd };

  Tag tag = Tag::naive;
  FilterKind filter = FilterKind::tikhonov;  // used when tag == filtered
  double alpha = 0.0;                        // ignored for naive

  static SpectralMethod naive();
  static SpectralMethod filtered(FilterKind kind, double alpha);
  static SpectralMethod l1(double alpha);
  static SpectralMethod l_half(double alpha);
};

/// Plain inversion: sum over retained triplets of (<y,u_n>/sigma_n) v_n.
RealVector naive_inverse(const SingularSystem& S, const RealVector& y);

/// Linear filtered inversion: sum of (q(alpha,sigma_n)/sigma_n) <y,u_n> v_n.
RealVector filtered_inverse(const SingularSystem& S, const RealVector& y, FilterKind kind,
                            double alpha);

/// Soft-thresholded inversion: sum of S_alpha(sigma_n <y,u_n>) / sigma_n^2 v_n.
/// A coefficient is zeroed exactly when |sigma_n <y,u_n>| <= alpha/2.
RealVector l1_svd(const SingularSystem& S, const RealVector& y, double alpha);

/// Half-thresholded inversion: sum of H_{alpha,n}(sigma_n^(1/3) <y,u_n>) v_n.
/// A coefficient is zeroed exactly when |sigma_n^(1/3) <y,u_n>| <= (3/4) alpha^(2/3).
RealVector l_half_svd(const SingularSystem& S, const RealVector& y, double alpha);

RealVector recover(const SingularSystem& S, const RealVector& y, const SpectralMethod& method);

}  // namespace spectral
