// Experiment runner for the sparse-recovery toolkit: generates problems,
// runs spectral and iterative algorithms, and emits plot-ready CSV output.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "spectral/bench.hpp"
#include "spectral/csvio.hpp"

namespace {

using spectral::AlphaRule;
using spectral::ExperimentConfig;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<double> snr_db;
  std::optional<double> alpha;
  std::optional<std::string> alpha_rule;
  std::optional<double> alpha_c;
  std::optional<double> success_threshold;
  std::optional<std::string> out_dir;
  std::optional<int> workers;
  std::optional<bool> timing;
  std::vector<std::string> algorithms;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file; flags override its fields");
  cmd->add_option("--seed", f.seed, "global seed (env SPECTRAL_SPARSE_SEED is the fallback)");
  cmd->add_option("--trials", f.trials, "trials per configuration");
  cmd->add_option("--snr-db", f.snr_db, "noise level in dB");
  cmd->add_option("--alpha", f.alpha, "fixed regularization parameter");
  cmd->add_option("--alpha-rule", f.alpha_rule,
                  "one of: fixed, oder-delta, discrepancy, rate-two-thirds, rate-one-half");
  cmd->add_option("--alpha-c", f.alpha_c, "scale constant for the delta-driven rules");
  cmd->add_option("--success-threshold", f.success_threshold, "relative-error success cutoff");
  cmd->add_option("--out", f.out_dir, "output directory");
  cmd->add_option("--workers", f.workers, "parallel trial workers");
  cmd->add_flag("--timing,!--no-timing", f.timing,
                "write measured wall times into results.csv (disable for byte-stable reruns)");
  cmd->add_option("--algorithms", f.algorithms, "algorithms to run")->delimiter(',');
}

ExperimentConfig build_config(const CommonFlags& f, const std::string& experiment) {
  ExperimentConfig cfg;
  bool config_has_seed = false;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw std::runtime_error("cannot open config: " + f.config_path);
    nlohmann::json j;
    in >> j;
    config_has_seed = j.contains("seed");
    cfg = spectral::config_from_json(j);
  }
  cfg.experiment = experiment;
  // precedence: flag, then config file, then the environment fallback
  if (const char* env = std::getenv("SPECTRAL_SPARSE_SEED"); env && !f.seed && !config_has_seed)
    cfg.seed = std::strtoull(env, nullptr, 10);
  if (f.seed) cfg.seed = *f.seed;
  if (f.trials) cfg.trials = *f.trials;
  if (f.snr_db) cfg.snr_db = *f.snr_db;
  if (f.success_threshold) cfg.success_threshold = *f.success_threshold;
  if (f.out_dir) cfg.output_dir = *f.out_dir;
  if (f.workers) cfg.workers = *f.workers;
  if (f.timing) cfg.emit_timing = *f.timing;
  if (!f.algorithms.empty()) cfg.algorithms = f.algorithms;
  if (f.alpha_rule) {
    const std::string& r = *f.alpha_rule;
    if (r == "fixed") {
      if (!f.alpha) throw std::runtime_error("--alpha-rule fixed needs --alpha");
      cfg.alpha_rule = AlphaRule::fixed(*f.alpha);
    } else if (r == "oder-delta") {
      cfg.alpha_rule = AlphaRule::oder_delta(f.alpha_c.value_or(0.003));
    } else if (r == "discrepancy") {
      cfg.alpha_rule = AlphaRule::discrepancy_rule();
    } else if (r == "rate-two-thirds") {
      cfg.alpha_rule = AlphaRule::rate_two_thirds(f.alpha_c.value_or(1.0), 1.0);
    } else if (r == "rate-one-half") {
      cfg.alpha_rule = AlphaRule::rate_one_half(f.alpha_c.value_or(1.0), 1.0);
    } else {
      throw std::runtime_error("unknown --alpha-rule: " + r);
    }
  } else if (f.alpha) {
    cfg.alpha_rule = AlphaRule::fixed(*f.alpha);
  }
  return cfg;
}

int report_failures(const spectral::BenchOutput& out) {
  for (const auto& f : out.failures) std::cerr << "failed: " << f << "\n";
  return out.failures.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse recovery via spectral thresholding and iterative baselines"};
  app.require_subcommand(1);

  CommonFlags cs_flags, deblur_flags, curve_flags, rate_flags, recover_flags;

  auto* cs = app.add_subcommand("cs-bench", "random Gaussian compressive-sensing benchmark");
  add_common_flags(cs, cs_flags);
  std::vector<int> cs_sizes;
  std::vector<int> cs_sparsity;
  double cs_ratio = 0.0;
  cs->add_option("--sizes", cs_sizes, "square problem sizes, e.g. 200,400")->delimiter(',');
  cs->add_option("--sparsity", cs_sparsity, "explicit support sizes")->delimiter(',');
  cs->add_option("--sparsity-ratio", cs_ratio, "support as a fraction of m");

  auto* deblur = app.add_subcommand("deblur-bench", "Gaussian-blur deblurring benchmark");
  add_common_flags(deblur, deblur_flags);
  std::vector<int> deblur_ns;
  std::vector<double> deblur_taus;
  deblur->add_option("--image-sizes", deblur_ns, "image sides, e.g. 16,32")->delimiter(',');
  deblur->add_option("--taus", deblur_taus, "PSF spreads, e.g. 0.6,0.7,0.8,0.9")->delimiter(',');

  auto* curve = app.add_subcommand("success-curve", "success probability versus support size");
  add_common_flags(curve, curve_flags);
  std::vector<int> curve_supports;
  int curve_n = 0;
  curve->add_option("--supports", curve_supports, "support levels, e.g. 20,60,120")->delimiter(',');
  curve->add_option("--size", curve_n, "square problem size");

  auto* rate = app.add_subcommand("rate-check", "error-versus-noise slopes on diagonal synthetics");
  add_common_flags(rate, rate_flags);
  int rate_points = 0;
  double rate_c = 0.0;
  rate->add_option("--points", rate_points, "delta samples per sweep");
  rate->add_option("--rate-c", rate_c, "scale constant in alpha(delta)");

  auto* rec = app.add_subcommand("recover", "run one algorithm on K.csv and y.csv");
  add_common_flags(rec, recover_flags);
  std::string rec_k, rec_y, rec_alg = "l1-svd", rec_out_file = "x_hat.csv";
  rec->add_option("k_csv", rec_k, "operator file")->required();
  rec->add_option("y_csv", rec_y, "data file")->required();
  rec->add_option("--algorithm", rec_alg, "algorithm name");
  rec->add_option("--out-file", rec_out_file, "estimate output file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cs->parsed()) {
      ExperimentConfig cfg = build_config(cs_flags, "cs_bench");
      if (!cs_sizes.empty()) {
        cfg.sizes.clear();
        for (int n : cs_sizes) cfg.sizes.emplace_back(n, n);
      }
      if (!cs_sparsity.empty()) cfg.sparsity = cs_sparsity;
      if (cs_ratio > 0.0) cfg.sparsity_ratio = cs_ratio;
      if (cfg.algorithms.empty() || (cs_flags.algorithms.empty() && cs_flags.config_path.empty()))
        cfg.algorithms = {"l1-svd", "lhalf-svd", "ista", "fista"};
      auto out = spectral::run_cs_bench(cfg);
      std::cout << "cs-bench: " << out.rows.size() << " rows";
      if (!cfg.output_dir.empty()) std::cout << " -> " << cfg.output_dir;
      std::cout << "\n";
      return report_failures(out);
    }
    if (deblur->parsed()) {
      ExperimentConfig cfg = build_config(deblur_flags, "deblur_bench");
      if (!deblur_ns.empty()) cfg.image_sizes = deblur_ns;
      if (!deblur_taus.empty()) cfg.taus = deblur_taus;
      if (deblur_flags.algorithms.empty() && deblur_flags.config_path.empty())
        cfg.algorithms = {"l1-svd", "lhalf-svd", "pg-half"};
      auto out = spectral::run_deblur_bench(cfg);
      std::cout << "deblur-bench: " << out.rows.size() << " rows";
      if (!cfg.output_dir.empty()) std::cout << " -> " << cfg.output_dir;
      std::cout << "\n";
      return report_failures(out);
    }
    if (curve->parsed()) {
      ExperimentConfig cfg = build_config(curve_flags, "success_curve");
      if (!curve_supports.empty()) cfg.sparsity = curve_supports;
      if (curve_n > 0) cfg.sizes = {{curve_n, curve_n}};
      if (curve_flags.algorithms.empty() && curve_flags.config_path.empty())
        cfg.algorithms = {"l1-svd", "lhalf-svd", "ista", "fista"};
      auto out = spectral::run_success_curve(cfg);
      std::cout << "success-curve: " << out.rows.size() << " rows";
      if (!cfg.output_dir.empty()) std::cout << " -> " << cfg.output_dir;
      std::cout << "\n";
      return report_failures(out);
    }
    if (rate->parsed()) {
      ExperimentConfig cfg = build_config(rate_flags, "rate_check");
      if (rate_points > 0) cfg.rate_points = rate_points;
      if (rate_c > 0.0) cfg.rate_c = rate_c;
      auto out = spectral::run_rate_check(cfg);
      for (const auto& reg : out.regimes)
        std::cout << reg.regime << " exponent=" << reg.exponent << " slope=" << reg.fit.slope
                  << " r2=" << reg.fit.r_squared << "\n";
      return 0;
    }
    if (rec->parsed()) {
      if (!std::filesystem::exists(rec_k)) {
        std::cerr << "missing file: " << rec_k << "\n";
        return 2;
      }
      if (!std::filesystem::exists(rec_y)) {
        std::cerr << "missing file: " << rec_y << "\n";
        return 2;
      }
      ExperimentConfig cfg = build_config(recover_flags, "recover_single");
      AlphaRule rule = cfg.alpha_rule;
      if (!recover_flags.alpha && !recover_flags.alpha_rule)
        rule = AlphaRule::fixed(1e-6);
      const auto K = spectral::read_matrix_csv(rec_k);
      const auto y = spectral::read_vector_csv(rec_y);
      auto single = spectral::recover_single(K, y, rec_alg, rule, cfg);
      const std::filesystem::path out_file =
          cfg.output_dir.empty() ? std::filesystem::path(rec_out_file)
                                 : std::filesystem::path(cfg.output_dir) / rec_out_file;
      if (!cfg.output_dir.empty()) std::filesystem::create_directories(cfg.output_dir);
      spectral::write_vector_csv(out_file, single.x_hat);
      nlohmann::json sidecar{{"algorithm", rec_alg},
                             {"alpha", single.alpha},
                             {"iterations", single.iterations},
                             {"residual", single.residual},
                             {"time_ms", single.time_ms}};
      std::ofstream side(out_file.string() + ".json");
      side << sidecar.dump(2) << "\n";
      std::cout << "recover: wrote " << out_file.string() << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
