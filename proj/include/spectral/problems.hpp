#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>

#include "spectral/linalg.hpp"

namespace spectral {

/// One trial: operator, ground truth, exact and noisy data, noise norm.
struct ProblemInstance {
  DenseMatrix K;
  RealVector x_true;
  RealVector y_clean;
  RealVector y_noisy;
  double delta = 0.0;  // ||y_noisy - y_clean||_2, exactly as drawn
  double snr_db = 0.0;
  std::uint64_t seed = 0;
};

/// Gaussian blur operator parameters: image side n, PSF bandwidth, spread tau.
struct BlurSpec {
  int n;
  int band;
  double tau;

  BlurSpec(int n_, int band_, double tau_);
  static BlurSpec with_defaults(int n, double tau = 0.7);  // band = floor(n/4)
};

/// i.i.d. standard normal entries, deterministic per seed.
DenseMatrix gaussian_matrix(int m, int n, std::uint64_t seed);

/// Exactly s nonzeros at distinct uniform indices, standard normal values.
RealVector sparse_signal(int n, int s, std::uint64_t seed);

/// K = (2 pi tau^2)^(-1) (T kron T) with T the symmetric banded Toeplitz
/// matrix whose first row is exp(-i^2 / (2 tau^2)) for i < band, then zeros.
DenseMatrix blur_operator(const BlurSpec& spec);

/// Additive white Gaussian noise at the given SNR: noise variance is
/// mean-signal-power / 10^(snr_db/10). snr_db = +infinity means no noise.
/// Returns (y + e, ||e||_2).
std::pair<RealVector, double> awgn(const RealVector& y, double snr_db, std::uint64_t seed);

ProblemInstance make_cs_instance(int m, int n, int s, double snr_db, std::uint64_t seed);
ProblemInstance make_deblur_instance(const BlurSpec& spec, RealVector x_true, double snr_db,
                                     std::uint64_t seed);

/// Directory layout: K.csv, x_true.csv, y_clean.csv, y_noisy.csv, meta.json.
void save_instance(const std::filesystem::path& dir, const ProblemInstance& inst);
ProblemInstance load_instance(const std::filesystem::path& dir);

}  // namespace spectral
