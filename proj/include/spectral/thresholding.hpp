#pragma once

namespace spectral {

enum class FilterKind { tikhonov, landweber, tsvd };

/// Parameters shared by the nonlinear scalar thresholds: the regularization
/// weight and the singular value the coefficient belongs to.
struct ThresholdParams {
  double alpha;
  double sigma_n;

  ThresholdParams(double alpha_, double sigma_n_);
};

/// Shrink-toward-zero map with dead zone [-alpha/2, alpha/2]:
///   t + alpha/2  for t <= -alpha/2
///   0            for |t| <= alpha/2
///   t - alpha/2  for t >=  alpha/2
double soft_threshold(double t, double alpha);

/// Discontinuous shrinkage for the square-root penalty. Zero for
/// |t| <= (3/4) alpha^(2/3); otherwise
///   (2 / (3 sigma_n^(4/3))) t (1 + cos(2 pi/3 - (2/3) phi_alpha(t)))
/// with phi_alpha(t) = arccos((alpha/8) (|t|/3)^(-3/2)).
/// For nonzero output x with sigma_n = 1, eta = sqrt(|x|) solves the cubic
/// eta^3 - |t| eta + alpha/4 = 0 (the trigonometric form picks the root
/// 2r cos(pi/3 - phi/3), the larger of the two positive roots).
double half_threshold(double t, double alpha, double sigma_n);

/// Classical linear filter value q(alpha, sigma) in [0, 1]:
///   tikhonov:  sigma^2 / (alpha + sigma^2)
///   landweber: 1 - (1 - alpha sigma^2)^(1/alpha), base clamped at 0
///   tsvd:      1 if sigma^2 >= alpha, else 0
double classical_filter(FilterKind kind, double alpha, double sigma);

/// Dead-zone edge of the half threshold: (3/4) alpha^(2/3).
double half_threshold_boundary(double alpha);

}  // namespace spectral
