#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spectral/iterative.hpp"
#include "spectral/linalg.hpp"
#include "spectral/metrics.hpp"
#include "spectral/problems.hpp"
#include "spectral/recovery.hpp"

namespace spectral {

/// Algorithm names accepted by the benches and the CLI:
///   naive, tikhonov, landweber, tsvd, l1-svd, lhalf-svd, ista, fista, pg-half
bool is_spectral_algorithm(const std::string& name);
bool is_iterative_algorithm(const std::string& name);

struct ExperimentConfig {
  std::string experiment = "cs_bench";
  std::vector<std::string> algorithms = {"l1-svd", "lhalf-svd"};
  std::vector<std::pair<int, int>> sizes = {{200, 200}};
  std::vector<int> sparsity;       // explicit support levels; empty -> ratio
  double sparsity_ratio = 0.1;
  double snr_db = 80.0;
  int trials = 1;
  std::uint64_t seed = 1;
  AlphaRule alpha_rule = AlphaRule::oder_delta();
  AlphaRule iterative_alpha_rule = AlphaRule::discrepancy_rule();
  double success_threshold = 1e-2;
  std::string output_dir;         // empty: keep results in memory only
  int workers = 1;
  bool emit_timing = true;        // false writes time_ms as 0 for stable output

  // deblur grids
  std::vector<int> image_sizes = {32};
  std::vector<double> taus = {0.7};

  // rate check
  double rate_c = 1.0;
  int rate_points = 17;

  // iterative solver controls
  int max_iters = 2000;
  double rel_change_tol = 1e-5;

  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// One line of results.csv. The trial index is kept for deterministic
/// ordering but is not serialized; the schema is fixed:
/// algorithm,m,n,s,snr_db,alpha,rerror,iterations,time_ms,success,seed
struct ResultRow {
  std::string algorithm;
  int m = 0, n = 0, s = 0;
  double snr_db = 0.0, alpha = 0.0, rerror = 0.0;
  long iterations = 0;
  double time_ms = 0.0;
  bool success = false;
  std::uint64_t seed = 0;
  int trial = 0;
  double tau = 0.0;  // deblur only; serialized in summary.csv
};

struct RecoveryOutcome {
  RealVector x_hat;
  double alpha = 0.0;
  long iterations = 0;
  double time_ms = 0.0;
  bool alpha_hit_boundary = false;
  bool budget_exhausted = false;
};

/// Warm-started continuation over a descending alpha grid for the iterative
/// solvers under the discrepancy rule. A single iteration budget
/// (spec.max_iters) is spent across the whole scan; the scan stops at the
/// smallest grid alpha whose residual still reaches tau_d * delta, or when
/// the budget runs out.
struct ContinuationOutcome {
  double alpha = 0.0;
  RealVector x;
  long total_iterations = 0;
  bool qualified = false;
  bool budget_exhausted = false;
};
ContinuationOutcome discrepancy_continuation(const DenseMatrix& K, const RealVector& y, double delta,
                                             const DiscrepancyRule& rule, IterativeSpec spec);

/// Full per-trial pipeline for one named algorithm, timed end to end.
/// Spectral algorithms factor the operator themselves; iterative algorithms
/// rescale it first (the operator norm comes from the same SVD route).
RecoveryOutcome run_pipeline(const std::string& algorithm, const ProblemInstance& inst,
                             const AlphaRule& rule, const ExperimentConfig& controls);

/// Same pipeline against a precomputed factorization (shared-operator benches;
/// the factorization cost is then reported once in meta.json, not per trial).
RecoveryOutcome run_pipeline_cached(const std::string& algorithm, const ProblemInstance& inst,
                                    const SingularSystem& S, const AlphaRule& rule,
                                    const ExperimentConfig& controls);

struct BenchOutput {
  std::vector<ResultRow> rows;
  nlohmann::json summary;
  std::vector<std::string> failures;  // "(algorithm, trial): reason" per failed pair
};

BenchOutput run_cs_bench(const ExperimentConfig& cfg);
BenchOutput run_deblur_bench(const ExperimentConfig& cfg);
BenchOutput run_success_curve(const ExperimentConfig& cfg);

struct RateRegimeResult {
  std::string regime;    // "source" or "squared-source"
  double exponent;       // alpha(delta) = c (delta/E)^exponent
  LogLogFit fit;
  std::vector<std::pair<double, double>> points;  // (delta, error)
};
struct RateCheckOutput {
  std::vector<RateRegimeResult> regimes;
};
RateCheckOutput run_rate_check(const ExperimentConfig& cfg);

struct SingleRecovery {
  RealVector x_hat;
  double alpha = 0.0;
  long iterations = 0;
  double residual = 0.0;
  double time_ms = 0.0;
};
SingleRecovery recover_single(const DenseMatrix& K, const RealVector& y,
                              const std::string& algorithm, const AlphaRule& rule,
                              const ExperimentConfig& controls);

void write_results_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows,
                       bool emit_timing);
std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);

std::string tool_version();

}  // namespace spectral
