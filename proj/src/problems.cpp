#include "spectral/problems.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "spectral/csvio.hpp"
#include "spectral/rng.hpp"

namespace spectral {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr int kGeneratorVersion = 1;

int count_nonzeros(const RealVector& v) {
  int s = 0;
  for (double x : v) s += x != 0.0;
  return s;
}
}  // namespace

BlurSpec::BlurSpec(int n_, int band_, double tau_) : n(n_), band(band_), tau(tau_) {
  if (n < 1) throw std::invalid_argument("BlurSpec: n must be positive");
  if (band < 1 || band > n) throw std::invalid_argument("BlurSpec: band must be in [1, n]");
  if (!(tau > 0.0)) throw std::invalid_argument("BlurSpec: tau must be positive");
}

BlurSpec BlurSpec::with_defaults(int n, double tau) { return BlurSpec(n, std::max(1, n / 4), tau); }

DenseMatrix gaussian_matrix(int m, int n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("gaussian_matrix: dimensions must be positive");
  SplitMix64 rng(seed);
  std::vector<double> entries(static_cast<std::size_t>(m) * n);
  for (double& v : entries) v = rng.next_normal();
  return DenseMatrix(m, n, std::move(entries));
}

RealVector sparse_signal(int n, int s, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sparse_signal: n must be positive");
  if (s < 0 || s > n) throw std::invalid_argument("sparse_signal: need 0 <= s <= n");
  SplitMix64 rng(seed);
  // partial Fisher-Yates picks s distinct indices
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  RealVector x(n, 0.0);
  for (int k = 0; k < s; ++k) {
    const auto j = k + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - k)));
    std::swap(idx[k], idx[j]);
    double v = rng.next_normal();
    while (v == 0.0) v = rng.next_normal();  // keep the support size exact
    x[idx[k]] = v;
  }
  return x;
}

DenseMatrix blur_operator(const BlurSpec& spec) {
  const std::size_t n = static_cast<std::size_t>(spec.n);
  if (n > 65535) throw std::overflow_error("blur_operator: n^2 overflows the dense representation");
  RealVector first_row(n, 0.0);
  for (int i = 0; i < spec.band; ++i)
    first_row[i] = std::exp(-static_cast<double>(i) * i / (2.0 * spec.tau * spec.tau));
  DenseMatrix T = symmetric_banded_toeplitz(first_row);
  DenseMatrix K = kron(T, T);
  K *= 1.0 / (2.0 * kPi * spec.tau * spec.tau);
  return K;
}

std::pair<RealVector, double> awgn(const RealVector& y, double snr_db, std::uint64_t seed) {
  const double power = dot(y, y) / static_cast<double>(y.size());
  if (!(power > 0.0)) throw std::invalid_argument("awgn: zero signal, SNR undefined");
  if (std::isinf(snr_db) && snr_db > 0) return {y, 0.0};
  const double noise_sd = std::sqrt(power * std::pow(10.0, -snr_db / 10.0));
  SplitMix64 rng(seed);
  RealVector noisy(y.size());
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = noise_sd * rng.next_normal();
    noisy[i] = y[i] + e;
    norm_sq += e * e;
  }
  return {std::move(noisy), std::sqrt(norm_sq)};
}

ProblemInstance make_cs_instance(int m, int n, int s, double snr_db, std::uint64_t seed) {
  ProblemInstance inst;
  inst.K = gaussian_matrix(m, n, derive_seed(seed, 1));
  inst.x_true = sparse_signal(n, s, derive_seed(seed, 2));
  inst.y_clean = matvec(inst.K, inst.x_true);
  auto [noisy, delta] = awgn(inst.y_clean, snr_db, derive_seed(seed, 3));
  inst.y_noisy = std::move(noisy);
  inst.delta = delta;
  inst.snr_db = snr_db;
  inst.seed = seed;
  return inst;
}

ProblemInstance make_deblur_instance(const BlurSpec& spec, RealVector x_true, double snr_db,
                                     std::uint64_t seed) {
  const std::size_t dim = static_cast<std::size_t>(spec.n) * spec.n;
  if (x_true.size() != dim) throw std::invalid_argument("make_deblur_instance: image size mismatch");
  ensure_finite(x_true, "x_true");
  ProblemInstance inst;
  inst.K = blur_operator(spec);
  inst.x_true = std::move(x_true);
  inst.y_clean = matvec(inst.K, inst.x_true);
  auto [noisy, delta] = awgn(inst.y_clean, snr_db, derive_seed(seed, 3));
  inst.y_noisy = std::move(noisy);
  inst.delta = delta;
  inst.snr_db = snr_db;
  inst.seed = seed;
  return inst;
}

void save_instance(const std::filesystem::path& dir, const ProblemInstance& inst) {
  std::filesystem::create_directories(dir);
  write_matrix_csv(dir / "K.csv", inst.K);
  write_vector_csv(dir / "x_true.csv", inst.x_true);
  write_vector_csv(dir / "y_clean.csv", inst.y_clean);
  write_vector_csv(dir / "y_noisy.csv", inst.y_noisy);
  nlohmann::json meta{{"m", inst.K.rows()},
                      {"n", inst.K.cols()},
                      {"s", count_nonzeros(inst.x_true)},
                      {"snr_db", inst.snr_db},
                      {"delta", inst.delta},
                      {"seed", inst.seed},
                      {"generator_version", kGeneratorVersion}};
  std::ofstream out(dir / "meta.json");
  if (!out) throw std::runtime_error("cannot write " + (dir / "meta.json").string());
  out << meta.dump(2) << "\n";
}

ProblemInstance load_instance(const std::filesystem::path& dir) {
  ProblemInstance inst;
  inst.K = read_matrix_csv(dir / "K.csv");
  inst.x_true = read_vector_csv(dir / "x_true.csv");
  inst.y_clean = read_vector_csv(dir / "y_clean.csv");
  inst.y_noisy = read_vector_csv(dir / "y_noisy.csv");
  std::ifstream in(dir / "meta.json");
  if (!in) throw std::runtime_error("cannot read " + (dir / "meta.json").string());
  nlohmann::json meta;
  in >> meta;
  inst.delta = meta.at("delta").get<double>();
  inst.snr_db = meta.at("snr_db").get<double>();
  inst.seed = meta.at("seed").get<std::uint64_t>();
  return inst;
}

}  // namespace spectral
