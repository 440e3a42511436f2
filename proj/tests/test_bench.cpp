#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "spectral/bench.hpp"
#include "spectral/csvio.hpp"
#include "test_support.hpp"

using namespace spectral;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

bool rows_equal_ignoring_time(const ResultRow& a, const ResultRow& b) {
  return a.algorithm == b.algorithm && a.m == b.m && a.n == b.n && a.s == b.s &&
         a.snr_db == b.snr_db && a.alpha == b.alpha && a.rerror == b.rerror &&
         a.iterations == b.iterations && a.success == b.success && a.seed == b.seed;
}

ExperimentConfig tiny_cs_config() {
  ExperimentConfig cfg;
  cfg.experiment = "cs_bench";
  cfg.algorithms = {"l1-svd", "lhalf-svd", "ista", "fista"};
  cfg.sizes = {{40, 40}};
  cfg.trials = 2;
  cfg.seed = 31;
  return cfg;
}

}  // namespace

TEST_CASE("cs bench produces a full results table") {
  ExperimentConfig cfg = tiny_cs_config();
  const auto dir = std::filesystem::temp_directory_path() / "spectral_bench_cs";
  std::filesystem::remove_all(dir);
  cfg.output_dir = dir.string();
  const BenchOutput out = run_cs_bench(cfg);
  CHECK(out.rows.size() == 8);  // 4 algorithms x 2 trials
  for (const auto& r : out.rows) {
    CHECK(r.m == 40);
    CHECK(r.s == 4);  // 0.1 * m
    CHECK(std::isfinite(r.rerror));
    CHECK(r.alpha > 0.0);
  }
  CHECK(std::filesystem::exists(dir / "results.csv"));
  CHECK(std::filesystem::exists(dir / "summary.csv"));
  CHECK(std::filesystem::exists(dir / "meta.json"));

  SUBCASE("the emitted csv re-parses to the same rows") {
    const auto parsed = read_results_csv(dir / "results.csv");
    REQUIRE(parsed.size() == out.rows.size());
    for (std::size_t i = 0; i < parsed.size(); ++i) {
      CHECK(parsed[i].algorithm == out.rows[i].algorithm);
      CHECK(parsed[i].rerror == out.rows[i].rerror);
      CHECK(parsed[i].seed == out.rows[i].seed);
    }
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("cs bench repeats are identical apart from wall time") {
  ExperimentConfig cfg = tiny_cs_config();
  const BenchOutput a = run_cs_bench(cfg);
  const BenchOutput b = run_cs_bench(cfg);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i)
    CHECK(rows_equal_ignoring_time(a.rows[i], b.rows[i]));
}

TEST_CASE("worker count does not change results") {
  ExperimentConfig cfg = tiny_cs_config();
  const BenchOutput serial = run_cs_bench(cfg);
  cfg.workers = 4;
  const BenchOutput parallel = run_cs_bench(cfg);
  REQUIRE(serial.rows.size() == parallel.rows.size());
  for (std::size_t i = 0; i < serial.rows.size(); ++i)
    CHECK(rows_equal_ignoring_time(serial.rows[i], parallel.rows[i]));
}

TEST_CASE("timing-free output is byte-stable") {
  ExperimentConfig cfg = tiny_cs_config();
  cfg.emit_timing = false;
  const auto dir_a = std::filesystem::temp_directory_path() / "spectral_bench_det_a";
  const auto dir_b = std::filesystem::temp_directory_path() / "spectral_bench_det_b";
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
  cfg.output_dir = dir_a.string();
  run_cs_bench(cfg);
  cfg.output_dir = dir_b.string();
  run_cs_bench(cfg);
  CHECK(slurp(dir_a / "results.csv") == slurp(dir_b / "results.csv"));
  CHECK(slurp(dir_a / "summary.csv") == slurp(dir_b / "summary.csv"));
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}

TEST_CASE("deblur bench emits conditioning data") {
  ExperimentConfig cfg;
  cfg.experiment = "deblur_bench";
  cfg.algorithms = {"l1-svd", "lhalf-svd", "pg-half"};
  cfg.image_sizes = {8};
  cfg.taus = {0.6, 0.7};
  cfg.trials = 2;
  cfg.seed = 5;
  const auto dir = std::filesystem::temp_directory_path() / "spectral_bench_deblur";
  std::filesystem::remove_all(dir);
  cfg.output_dir = dir.string();
  const BenchOutput out = run_deblur_bench(cfg);
  CHECK(out.rows.size() == 12);  // 3 algorithms x 2 taus x 2 trials
  for (const auto& r : out.rows) {
    CHECK(r.m == 64);
    CHECK(std::isfinite(r.rerror));
    CHECK(r.rerror <= 0.05);
  }
  const std::string conds = slurp(dir / "conditions.csv");
  CHECK(conds.find("n,tau,cond") == 0);
  // conditioning strictly grows with tau
  const auto parse_cond = [&](double tau) {
    for (const auto& info : out.summary["rows"])
      if (info[info.size() - 2].get<double>() == tau) return info.back().get<double>();
    return -1.0;
  };
  CHECK(parse_cond(0.7) > parse_cond(0.6));
  std::filesystem::remove_all(dir);
}

TEST_CASE("deblur at image side 32 recovers sparse images accurately") {
  ExperimentConfig cfg;
  cfg.experiment = "deblur_bench";
  cfg.algorithms = {"l1-svd", "lhalf-svd"};
  cfg.image_sizes = {32};
  cfg.taus = {0.7};
  cfg.trials = 3;
  cfg.seed = 21;
  const BenchOutput out = run_deblur_bench(cfg);
  std::vector<double> lhalf_errors;
  for (const auto& r : out.rows) {
    CHECK(r.m == 1024);
    if (r.algorithm == "lhalf-svd") lhalf_errors.push_back(r.rerror);
  }
  REQUIRE(lhalf_errors.size() == 3);
  std::sort(lhalf_errors.begin(), lhalf_errors.end());
  CHECK(lhalf_errors[1] <= 0.05);  // median over the three trials
}

TEST_CASE("success curve handles the empty-support level") {
  ExperimentConfig cfg;
  cfg.experiment = "success_curve";
  cfg.algorithms = {"l1-svd", "ista"};
  cfg.sizes = {{30, 30}};
  cfg.sparsity = {0, 3};
  cfg.trials = 3;
  cfg.seed = 77;
  const BenchOutput out = run_success_curve(cfg);
  CHECK(out.rows.size() == 12);
  for (const auto& row : out.summary["rows"]) {
    const double rate = row[2].get<double>();
    CHECK(rate >= 0.0);
    CHECK(rate <= 1.0);
    if (row[0].get<int>() == 0) CHECK(rate == 1.0);
  }
}

TEST_CASE("recover_single inverts an identity operator") {
  const DenseMatrix K = DenseMatrix::identity(4);
  const RealVector y = {0.5, -1.0, 2.0, 0.0};
  ExperimentConfig controls;
  const SingleRecovery single = recover_single(K, y, "l1-svd", AlphaRule::fixed(1e-9), controls);
  CHECK(testsupport::max_abs_diff(single.x_hat, y) <= 1e-8);
  CHECK(single.residual <= 1e-8);
  CHECK_THROWS_AS(recover_single(K, y, "l1-svd", AlphaRule::oder_delta(), controls),
                  std::invalid_argument);
}

TEST_CASE("config json round trip") {
  ExperimentConfig cfg = tiny_cs_config();
  cfg.alpha_rule = AlphaRule::rate_two_thirds(2.0, 3.0);
  cfg.iterative_alpha_rule = AlphaRule::discrepancy_rule();
  cfg.sparsity = {5, 6};
  cfg.taus = {0.6, 0.9};
  cfg.workers = 3;
  cfg.emit_timing = false;
  const ExperimentConfig back = config_from_json(config_to_json(cfg));
  CHECK(back.algorithms == cfg.algorithms);
  CHECK(back.sizes == cfg.sizes);
  CHECK(back.sparsity == cfg.sparsity);
  CHECK(back.trials == cfg.trials);
  CHECK(back.seed == cfg.seed);
  CHECK(back.workers == cfg.workers);
  CHECK(back.emit_timing == cfg.emit_timing);
  CHECK(back.alpha_rule.kind == cfg.alpha_rule.kind);
  CHECK(back.alpha_rule.c == cfg.alpha_rule.c);
  CHECK(back.alpha_rule.E == cfg.alpha_rule.E);
  CHECK(back.iterative_alpha_rule.kind == cfg.iterative_alpha_rule.kind);
  CHECK(back.taus == cfg.taus);
}

TEST_CASE("unknown algorithms are rejected up front") {
  ExperimentConfig cfg = tiny_cs_config();
  cfg.algorithms = {"l2-svd"};
  CHECK_THROWS_AS(run_cs_bench(cfg), std::invalid_argument);
}
