#include "spectral/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "spectral/csvio.hpp"
#include "spectral/rng.hpp"

namespace spectral {

namespace {

const std::vector<std::string> kSpectralNames = {"naive",  "tikhonov",  "landweber",
                                                 "tsvd",   "l1-svd",    "lhalf-svd"};
const std::vector<std::string> kIterativeNames = {"ista", "fista", "pg-half"};

SpectralMethod spectral_method(const std::string& name, double alpha) {
  if (name == "naive") return SpectralMethod::naive();
  if (name == "tikhonov") return SpectralMethod::filtered(FilterKind::tikhonov, alpha);
  if (name == "landweber") return SpectralMethod::filtered(FilterKind::landweber, alpha);
  if (name == "tsvd") return SpectralMethod::filtered(FilterKind::tsvd, alpha);
  if (name == "l1-svd") return SpectralMethod::l1(alpha);
  if (name == "lhalf-svd") return SpectralMethod::l_half(alpha);
  throw std::invalid_argument("unknown spectral algorithm: " + name);
}

IterativeAlgorithm iterative_algorithm(const std::string& name) {
  if (name == "ista") return IterativeAlgorithm::ista;
  if (name == "fista") return IterativeAlgorithm::fista;
  if (name == "pg-half") return IterativeAlgorithm::pg_half;
  throw std::invalid_argument("unknown iterative algorithm: " + name);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

RecoveryOutcome run_spectral(const std::string& name, const SingularSystem& S,
                             const ProblemInstance& inst, const AlphaRule& rule) {
  RecoveryOutcome out;
  if (name == "naive") {
    out.x_hat = naive_inverse(S, inst.y_noisy);
    return out;
  }
  if (rule.kind == AlphaRule::Kind::discrepancy) {
    auto closure = [&](double a) { return recover(S, inst.y_noisy, spectral_method(name, a)); };
    const AlphaSelection sel =
        select_alpha_discrepancy(closure, inst.K, inst.y_noisy, inst.delta, rule.discrepancy);
    out.alpha = sel.alpha;
    out.alpha_hit_boundary = sel.hit_boundary;
  } else {
    out.alpha = rule.resolve(inst.delta);
  }
  out.x_hat = recover(S, inst.y_noisy, spectral_method(name, out.alpha));
  return out;
}

RecoveryOutcome run_iterative_pipeline(const std::string& name, const ProblemInstance& inst,
                                       double sigma_max, const AlphaRule& rule,
                                       const ExperimentConfig& controls) {
  auto [Ks, c] = scale_operator(inst.K, sigma_max);
  const RealVector ys = scale(inst.y_noisy, c);
  const double delta_s = c * inst.delta;

  IterativeSpec spec;
  spec.algorithm = iterative_algorithm(name);
  spec.max_iters = controls.max_iters;
  spec.rel_change_tol = controls.rel_change_tol;
  if (spec.algorithm == IterativeAlgorithm::pg_half) {
    const double s1 = c * sigma_max;
    spec.step_scale = 0.99 / (s1 * s1);
  }

  RecoveryOutcome out;
  if (rule.kind == AlphaRule::Kind::discrepancy) {
    ContinuationOutcome cont = discrepancy_continuation(Ks, ys, delta_s, rule.discrepancy, spec);
    out.x_hat = std::move(cont.x);
    out.alpha = cont.alpha;
    out.iterations = cont.total_iterations;
    out.alpha_hit_boundary = !cont.qualified;
    out.budget_exhausted = cont.budget_exhausted;
  } else {
    spec.alpha = rule.resolve(delta_s);
    RealVector x0(Ks.cols(), 0.0);
    auto [x, trace] = run_iterative(Ks, ys, spec, x0);
    out.x_hat = std::move(x);
    out.alpha = spec.alpha;
    out.iterations = trace.iterations_run;
  }
  return out;
}

struct TrialTask {
  int size_index = 0;
  int trial = 0;
  int m = 0, n = 0, s = 0;
  std::uint64_t seed = 0;
};

/// Runs tasks over a bounded worker pool; results land in preassigned slots,
/// so worker count never changes the output.
void run_parallel(int workers, std::size_t count, const std::function<void(std::size_t)>& work) {
  const int nw = std::max(1, workers);
  if (nw == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int w = 0; w < std::min<std::size_t>(nw, count); ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          work(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.algorithm, a.m, a.n, a.tau, a.s, a.trial) <
           std::tie(b.algorithm, b.m, b.n, b.tau, b.s, b.trial);
  });
}

void write_meta(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                const nlohmann::json& extra) {
  nlohmann::json meta;
  meta["tool_version"] = tool_version();
  meta["config"] = config_to_json(cfg);
  meta["clock"] = {{"source", "std::chrono::steady_clock"},
                   {"tick_num", std::chrono::steady_clock::period::num},
                   {"tick_den", std::chrono::steady_clock::period::den}};
  const auto now = std::chrono::system_clock::now();
  meta["written_at_unix_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
  for (auto& [k, v] : extra.items()) meta[k] = v;
  std::ofstream out(dir / "meta.json");
  if (!out) throw std::runtime_error("cannot write " + (dir / "meta.json").string());
  out << meta.dump(2) << "\n";
}

void write_summary_csv(const std::filesystem::path& path, const nlohmann::json& summary) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (!summary.contains("columns") || !summary.contains("rows")) return;
  const auto& cols = summary["columns"];
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i].get<std::string>();
  out << "\n";
  for (const auto& row : summary["rows"]) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      const auto& cell = row[i];
      if (cell.is_string())
        out << cell.get<std::string>();
      else if (cell.is_number_integer())
        out << cell.get<long long>();
      else
        out << format_double(cell.get<double>());
    }
    out << "\n";
  }
}

void emit_outputs(const ExperimentConfig& cfg, const std::vector<ResultRow>& rows,
                  const nlohmann::json& summary, const nlohmann::json& meta_extra) {
  if (cfg.output_dir.empty()) return;
  const std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  write_results_csv(dir / "results.csv", rows, cfg.emit_timing);
  write_summary_csv(dir / "summary.csv", summary);
  write_meta(dir, cfg, meta_extra);
}

nlohmann::json summarize_rows(const std::vector<ResultRow>& rows, bool with_tau,
                              const std::map<std::pair<int, double>, double>& conds,
                              bool emit_timing) {
  // group by (algorithm, m, n, s, tau)
  std::map<std::tuple<std::string, int, int, int, double>, std::vector<const ResultRow*>> groups;
  for (const auto& r : rows) groups[{r.algorithm, r.m, r.n, r.s, r.tau}].push_back(&r);
  nlohmann::json summary;
  nlohmann::json cols = {"algorithm", "m", "n", "s", "snr_db", "median_rerror",
                         "median_time_ms", "success_rate", "trials"};
  if (with_tau) {
    cols.push_back("tau");
    cols.push_back("cond");
  }
  summary["columns"] = cols;
  summary["rows"] = nlohmann::json::array();
  for (const auto& [key, members] : groups) {
    std::vector<double> errs, times;
    double hits = 0;
    for (const auto* r : members) {
      errs.push_back(r->rerror);
      times.push_back(r->time_ms);
      hits += r->success;
    }
    nlohmann::json row = {std::get<0>(key),       std::get<1>(key), std::get<2>(key),
                          std::get<3>(key),       members.front()->snr_db,
                          median(errs),           emit_timing ? median(times) : 0.0,
                          hits / members.size(),  static_cast<long long>(members.size())};
    if (with_tau) {
      const double tau = std::get<4>(key);
      row.push_back(tau);
      auto it = conds.find({std::get<1>(key), tau});
      row.push_back(it == conds.end() ? 0.0 : it->second);
    }
    summary["rows"].push_back(row);
  }
  return summary;
}

int resolve_sparsity(const ExperimentConfig& cfg, std::size_t size_index, int m) {
  if (!cfg.sparsity.empty()) {
    if (cfg.sparsity.size() == 1) return cfg.sparsity.front();
    if (size_index < cfg.sparsity.size()) return cfg.sparsity[size_index];
    throw std::invalid_argument("sparsity list does not match the size list");
  }
  return static_cast<int>(std::lround(cfg.sparsity_ratio * m));
}

}  // namespace

bool is_spectral_algorithm(const std::string& name) {
  return std::find(kSpectralNames.begin(), kSpectralNames.end(), name) != kSpectralNames.end();
}

bool is_iterative_algorithm(const std::string& name) {
  return std::find(kIterativeNames.begin(), kIterativeNames.end(), name) != kIterativeNames.end();
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
  if (!(success_threshold > 0.0)) throw std::invalid_argument("config: success_threshold must be positive");
  for (const auto& a : algorithms)
    if (!is_spectral_algorithm(a) && !is_iterative_algorithm(a))
      throw std::invalid_argument("config: unknown algorithm '" + a + "'");
  for (const auto& [m, n] : sizes)
    if (m < 1 || n < 1) throw std::invalid_argument("config: sizes must be positive");
}

ContinuationOutcome discrepancy_continuation(const DenseMatrix& K, const RealVector& y, double delta,
                                             const DiscrepancyRule& rule, IterativeSpec spec) {
  std::vector<double> grid = rule.grid(delta);
  std::reverse(grid.begin(), grid.end());  // largest alpha first
  const double target = rule.tau_d * delta;

  ContinuationOutcome out;
  RealVector x_warm(K.cols(), 0.0);
  int budget = spec.max_iters;
  bool have_any = false;
  for (double alpha : grid) {
    if (budget <= 0) {
      out.budget_exhausted = true;
      break;
    }
    spec.alpha = alpha;
    spec.max_iters = budget;
    auto [x, trace] = run_iterative(K, y, spec, x_warm);
    budget -= trace.iterations_run;
    out.total_iterations += trace.iterations_run;
    const double residual = two_norm(sub(matvec(K, x), y));
    if (!have_any) {
      // keep something sensible even if the very first point disqualifies
      out.alpha = alpha;
      out.x = x;
      have_any = true;
    }
    if (residual >= target) {
      out.alpha = alpha;
      out.x = x;
      out.qualified = true;
      x_warm = std::move(x);
    } else {
      break;  // residual is monotone in alpha; smaller alphas cannot qualify
    }
  }
  return out;
}

RecoveryOutcome run_pipeline(const std::string& algorithm, const ProblemInstance& inst,
                             const AlphaRule& rule, const ExperimentConfig& controls) {
  auto [outcome, ms] = timed([&] {
    if (is_spectral_algorithm(algorithm)) {
      SingularSystem S = svd(inst.K);
      return run_spectral(algorithm, S, inst, rule);
    }
    if (!is_iterative_algorithm(algorithm))
      throw std::invalid_argument("unknown algorithm: " + algorithm);
    SingularSystem S = svd(inst.K);
    if (S.rank() == 0) throw std::invalid_argument("run_pipeline: zero operator");
    return run_iterative_pipeline(algorithm, inst, S.sigma.front(), rule, controls);
  });
  outcome.time_ms = ms;
  return outcome;
}

RecoveryOutcome run_pipeline_cached(const std::string& algorithm, const ProblemInstance& inst,
                                    const SingularSystem& S, const AlphaRule& rule,
                                    const ExperimentConfig& controls) {
  auto [outcome, ms] = timed([&] {
    if (is_spectral_algorithm(algorithm)) return run_spectral(algorithm, S, inst, rule);
    if (!is_iterative_algorithm(algorithm))
      throw std::invalid_argument("unknown algorithm: " + algorithm);
    if (S.rank() == 0) throw std::invalid_argument("run_pipeline_cached: zero operator");
    return run_iterative_pipeline(algorithm, inst, S.sigma.front(), rule, controls);
  });
  outcome.time_ms = ms;
  return outcome;
}

BenchOutput run_cs_bench(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<TrialTask> tasks;
  for (std::size_t si = 0; si < cfg.sizes.size(); ++si) {
    const auto [m, n] = cfg.sizes[si];
    const int s = resolve_sparsity(cfg, si, m);
    for (int t = 0; t < cfg.trials; ++t) {
      TrialTask task;
      task.size_index = static_cast<int>(si);
      task.trial = t;
      task.m = m;
      task.n = n;
      task.s = s;
      task.seed = derive_seed(derive_seed(cfg.seed, si), static_cast<std::uint64_t>(t));
      tasks.push_back(task);
    }
  }

  std::vector<std::vector<ResultRow>> slots(tasks.size());
  std::vector<std::vector<std::string>> failures(tasks.size());
  run_parallel(cfg.workers, tasks.size(), [&](std::size_t i) {
    const TrialTask& task = tasks[i];
    const ProblemInstance inst = make_cs_instance(task.m, task.n, task.s, cfg.snr_db, task.seed);
    for (const std::string& alg : cfg.algorithms) {
      const AlphaRule& rule = is_iterative_algorithm(alg) ? cfg.iterative_alpha_rule : cfg.alpha_rule;
      try {
        RecoveryOutcome outcome = run_pipeline(alg, inst, rule, cfg);
        ResultRow row;
        row.algorithm = alg;
        row.m = task.m;
        row.n = task.n;
        row.s = task.s;
        row.snr_db = cfg.snr_db;
        row.alpha = outcome.alpha;
        row.rerror = rerror(outcome.x_hat, inst.x_true);
        row.iterations = outcome.iterations;
        row.time_ms = outcome.time_ms;
        row.success = success(row.rerror, cfg.success_threshold);
        row.seed = task.seed;
        row.trial = task.trial;
        slots[i].push_back(std::move(row));
      } catch (const std::exception& e) {
        failures[i].push_back("(" + alg + ", trial " + std::to_string(task.trial) + "): " + e.what());
      }
    }
  });

  BenchOutput out;
  for (auto& slot : slots)
    for (auto& row : slot) out.rows.push_back(std::move(row));
  for (auto& slot : failures)
    for (auto& f : slot) out.failures.push_back(std::move(f));
  sort_rows(out.rows);
  out.summary = summarize_rows(out.rows, false, {}, cfg.emit_timing);
  emit_outputs(cfg, out.rows, out.summary, {});
  return out;
}

BenchOutput run_deblur_bench(const ExperimentConfig& cfg) {
  cfg.validate();
  BenchOutput out;
  std::map<std::pair<int, double>, double> conds;
  nlohmann::json operator_info = nlohmann::json::array();

  for (std::size_t ni = 0; ni < cfg.image_sizes.size(); ++ni) {
    const int n_img = cfg.image_sizes[ni];
    const int dim = n_img * n_img;
    for (std::size_t ti = 0; ti < cfg.taus.size(); ++ti) {
      const double tau = cfg.taus[ti];
      const BlurSpec spec = BlurSpec::with_defaults(n_img, tau);
      const DenseMatrix K = blur_operator(spec);
      auto [S, svd_ms] = timed([&] { return svd(K); });
      const double cond = cond2(S);
      conds[{dim, tau}] = cond;
      operator_info.push_back({{"n", n_img},
                               {"band", spec.band},
                               {"tau", tau},
                               {"cond", cond},
                               {"svd_time_ms", svd_ms}});

      const int s = resolve_sparsity(cfg, 0, dim);
      std::vector<std::vector<ResultRow>> slots(cfg.trials);
      std::vector<std::vector<std::string>> failures(cfg.trials);
      run_parallel(cfg.workers, static_cast<std::size_t>(cfg.trials), [&](std::size_t t) {
        const std::uint64_t inst_seed =
            derive_seed(derive_seed(cfg.seed, 1000 + ni * 100 + ti), static_cast<std::uint64_t>(t));
        ProblemInstance inst;
        inst.K = K;
        inst.x_true = sparse_signal(dim, s, derive_seed(inst_seed, 2));
        inst.y_clean = matvec(inst.K, inst.x_true);
        auto [noisy, delta] = awgn(inst.y_clean, cfg.snr_db, derive_seed(inst_seed, 3));
        inst.y_noisy = std::move(noisy);
        inst.delta = delta;
        inst.snr_db = cfg.snr_db;
        inst.seed = inst_seed;
        for (const std::string& alg : cfg.algorithms) {
          const AlphaRule& rule =
              is_iterative_algorithm(alg) ? cfg.iterative_alpha_rule : cfg.alpha_rule;
          try {
            RecoveryOutcome outcome = run_pipeline_cached(alg, inst, S, rule, cfg);
            ResultRow row;
            row.algorithm = alg;
            row.m = dim;
            row.n = dim;
            row.s = s;
            row.snr_db = cfg.snr_db;
            row.alpha = outcome.alpha;
            row.rerror = rerror(outcome.x_hat, inst.x_true);
            row.iterations = outcome.iterations;
            row.time_ms = outcome.time_ms;
            row.success = success(row.rerror, cfg.success_threshold);
            row.seed = inst_seed;
            row.trial = static_cast<int>(t);
            row.tau = tau;
            slots[t].push_back(std::move(row));
          } catch (const std::exception& e) {
            failures[t].push_back("(" + alg + ", trial " + std::to_string(t) + "): " + e.what());
          }
        }
      });
      for (auto& slot : slots)
        for (auto& row : slot) out.rows.push_back(std::move(row));
      for (auto& slot : failures)
        for (auto& f : slot) out.failures.push_back(std::move(f));
    }
  }
  sort_rows(out.rows);
  out.summary = summarize_rows(out.rows, true, conds, cfg.emit_timing);
  nlohmann::json extra;
  extra["operators"] = operator_info;
  emit_outputs(cfg, out.rows, out.summary, extra);

  if (!cfg.output_dir.empty()) {
    std::ofstream cc(std::filesystem::path(cfg.output_dir) / "conditions.csv");
    cc << "n,tau,cond\n";
    for (const auto& info : operator_info)
      cc << info["n"].get<int>() << "," << format_double(info["tau"].get<double>()) << ","
         << format_double(info["cond"].get<double>()) << "\n";
  }
  return out;
}

BenchOutput run_success_curve(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.sparsity.empty())
    throw std::invalid_argument("success_curve: provide explicit support levels in sparsity");
  const auto [m, n] = cfg.sizes.front();

  std::vector<TrialTask> tasks;
  for (std::size_t li = 0; li < cfg.sparsity.size(); ++li) {
    for (int t = 0; t < cfg.trials; ++t) {
      TrialTask task;
      task.size_index = static_cast<int>(li);
      task.trial = t;
      task.m = m;
      task.n = n;
      task.s = cfg.sparsity[li];
      task.seed = derive_seed(derive_seed(cfg.seed, 7000 + li), static_cast<std::uint64_t>(t));
      tasks.push_back(task);
    }
  }

  std::vector<std::vector<ResultRow>> slots(tasks.size());
  std::vector<std::vector<std::string>> failures(tasks.size());
  run_parallel(cfg.workers, tasks.size(), [&](std::size_t i) {
    const TrialTask& task = tasks[i];
    ProblemInstance inst;
    if (task.s == 0) {
      // zero support means zero data; the SNR calibration is undefined, so
      // the trial checks exact recovery of the zero signal at a unit alpha
      inst.K = gaussian_matrix(task.m, task.n, derive_seed(task.seed, 1));
      inst.x_true.assign(task.n, 0.0);
      inst.y_clean.assign(task.m, 0.0);
      inst.y_noisy.assign(task.m, 0.0);
      inst.delta = 0.0;
      inst.snr_db = cfg.snr_db;
      inst.seed = task.seed;
    } else {
      inst = make_cs_instance(task.m, task.n, task.s, cfg.snr_db, task.seed);
    }
    for (const std::string& alg : cfg.algorithms) {
      const AlphaRule& rule = is_iterative_algorithm(alg) ? cfg.iterative_alpha_rule : cfg.alpha_rule;
      try {
        RecoveryOutcome outcome = task.s == 0 ? run_pipeline(alg, inst, AlphaRule::fixed(1.0), cfg)
                                              : run_pipeline(alg, inst, rule, cfg);
        ResultRow row;
        row.algorithm = alg;
        row.m = task.m;
        row.n = task.n;
        row.s = task.s;
        row.snr_db = cfg.snr_db;
        row.alpha = outcome.alpha;
        if (task.s == 0) {
          row.rerror = two_norm(outcome.x_hat);  // absolute error against the zero signal
          row.success = row.rerror == 0.0;
        } else {
          row.rerror = rerror(outcome.x_hat, inst.x_true);
          row.success = success(row.rerror, cfg.success_threshold);
        }
        row.iterations = outcome.iterations;
        row.time_ms = outcome.time_ms;
        row.seed = task.seed;
        row.trial = task.trial;
        slots[i].push_back(std::move(row));
      } catch (const std::exception& e) {
        failures[i].push_back("(" + alg + ", trial " + std::to_string(task.trial) + "): " + e.what());
      }
    }
  });

  BenchOutput out;
  for (auto& slot : slots)
    for (auto& row : slot) out.rows.push_back(std::move(row));
  for (auto& slot : failures)
    for (auto& f : slot) out.failures.push_back(std::move(f));
  sort_rows(out.rows);

  // long-format curve: supp, algorithm, success_rate
  std::map<std::pair<int, std::string>, std::pair<int, int>> counter;  // (hits, total)
  for (const auto& r : out.rows) {
    auto& c = counter[{r.s, r.algorithm}];
    c.first += r.success;
    c.second += 1;
  }
  out.summary["columns"] = {"supp", "algorithm", "success_rate"};
  out.summary["rows"] = nlohmann::json::array();
  for (const auto& [key, c] : counter)
    out.summary["rows"].push_back(
        {key.first, key.second, static_cast<double>(c.first) / c.second});

  emit_outputs(cfg, out.rows, out.summary, {});
  if (!cfg.output_dir.empty()) {
    std::ofstream curve(std::filesystem::path(cfg.output_dir) / "success_curve.csv");
    curve << "supp,algorithm,success_rate\n";
    for (const auto& row : out.summary["rows"])
      curve << row[0].get<int>() << "," << row[1].get<std::string>() << ","
            << format_double(row[2].get<double>()) << "\n";
  }
  return out;
}

namespace {

/// Diagonal synthetic with x in the range of the adjoint: sigma_k = rho^k,
/// z proportional to sigma (unit norm), x = sigma .* z. The thresholding
/// boundary sweeps across the spectrum as delta shrinks.
RateRegimeResult rate_regime_source(double exponent, double c, int points, std::uint64_t seed) {
  const int N = 160;
  const double rho = 0.97;
  RealVector sigma(N), z(N);
  for (int i = 0; i < N; ++i) sigma[i] = std::pow(rho, i + 1);
  double zn = two_norm(sigma);
  for (int i = 0; i < N; ++i) z[i] = sigma[i] / zn;
  const double E = 1.0;

  RealVector x(N), y(N);
  for (int i = 0; i < N; ++i) {
    x[i] = sigma[i] * z[i];
    y[i] = sigma[i] * x[i];
  }
  SplitMix64 rng(derive_seed(seed, 11));
  RealVector w(N);
  for (double& v : w) v = rng.next_normal();
  const double wn = two_norm(w);
  for (double& v : w) v /= wn;

  const SingularSystem S = svd(DenseMatrix::diagonal(sigma));

  RateRegimeResult result;
  result.regime = "source";
  result.exponent = exponent;
  std::vector<double> deltas, errors;
  for (int k = 0; k < points; ++k) {
    const double delta =
        std::pow(10.0, -2.0 - 5.0 * static_cast<double>(k) / (points - 1));  // 1e-2 .. 1e-7
    const double alpha = c * std::pow(delta / E, exponent);
    RealVector yd(N);
    for (int i = 0; i < N; ++i) yd[i] = y[i] + delta * w[i];
    const double err = two_norm(sub(l1_svd(S, yd, alpha), x));
    deltas.push_back(delta);
    errors.push_back(err);
    result.points.emplace_back(delta, err);
  }
  result.fit = fit_loglog(deltas, errors);
  return result;
}

/// Diagonal synthetic with x in the range of the normal operator and every
/// coefficient above the dead zone throughout the sweep, so the alpha bias is
/// exactly linear.
RateRegimeResult rate_regime_squared_source(double exponent, double c, int points,
                                            std::uint64_t seed) {
  const RealVector sigma = {1.0, 0.9, 0.8, 0.7, 0.6, 0.5};
  const int N = static_cast<int>(sigma.size());
  SplitMix64 rng(derive_seed(seed, 13));
  RealVector z(N);
  for (double& v : z) v = std::fabs(rng.next_normal()) + 1.0;
  const double E = two_norm(z);

  RealVector x(N), y(N);
  for (int i = 0; i < N; ++i) {
    x[i] = sigma[i] * sigma[i] * z[i];
    y[i] = sigma[i] * x[i];
  }
  RealVector w(N);
  for (double& v : w) v = rng.next_normal();
  const double wn = two_norm(w);
  for (double& v : w) v /= wn;

  const SingularSystem S = svd(DenseMatrix::diagonal(sigma));

  RateRegimeResult result;
  result.regime = "squared-source";
  result.exponent = exponent;
  std::vector<double> deltas, errors;
  for (int k = 0; k < points; ++k) {
    const double delta =
        std::pow(10.0, -4.0 - 4.0 * static_cast<double>(k) / (points - 1));  // 1e-4 .. 1e-8
    const double alpha = c * std::pow(delta / E, exponent);
    RealVector yd(N);
    for (int i = 0; i < N; ++i) yd[i] = y[i] + delta * w[i];
    const double err = two_norm(sub(l1_svd(S, yd, alpha), x));
    deltas.push_back(delta);
    errors.push_back(err);
    result.points.emplace_back(delta, err);
  }
  result.fit = fit_loglog(deltas, errors);
  return result;
}

}  // namespace

RateCheckOutput run_rate_check(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.rate_points < 5) throw std::invalid_argument("rate_check: need at least 5 points");
  RateCheckOutput out;
  // both exponent choices are swept per regime; the summary records both
  out.regimes.push_back(rate_regime_source(2.0 / 3.0, cfg.rate_c, cfg.rate_points, cfg.seed));
  out.regimes.push_back(rate_regime_source(4.0 / 3.0, cfg.rate_c, cfg.rate_points, cfg.seed));
  out.regimes.push_back(rate_regime_squared_source(0.5, cfg.rate_c, cfg.rate_points, cfg.seed));
  out.regimes.push_back(rate_regime_squared_source(1.0, cfg.rate_c, cfg.rate_points, cfg.seed));

  if (!cfg.output_dir.empty()) {
    const std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);
    std::ofstream pts(dir / "rate_points.csv");
    pts << "regime,exponent,delta,error\n";
    for (const auto& reg : out.regimes)
      for (const auto& [d, e] : reg.points)
        pts << reg.regime << "," << format_double(reg.exponent) << "," << format_double(d) << ","
            << format_double(e) << "\n";
    std::ofstream summary(dir / "rate_summary.csv");
    summary << "regime,exponent,slope,r_squared\n";
    for (const auto& reg : out.regimes)
      summary << reg.regime << "," << format_double(reg.exponent) << ","
              << format_double(reg.fit.slope) << "," << format_double(reg.fit.r_squared) << "\n";
    write_meta(dir, cfg, {});
  }
  return out;
}

SingleRecovery recover_single(const DenseMatrix& K, const RealVector& y,
                              const std::string& algorithm, const AlphaRule& rule,
                              const ExperimentConfig& controls) {
  if (y.size() != K.rows()) throw std::invalid_argument("recover: K and y dimensions disagree");
  ensure_finite(y, "y");
  ProblemInstance inst;
  inst.K = K;
  inst.y_noisy = y;
  // no ground truth here; the delta-driven rules need an explicit noise level
  inst.delta = 0.0;
  if (rule.kind != AlphaRule::Kind::fixed)
    throw std::invalid_argument(
        "recover: delta-driven rules need a noise level; pass a fixed alpha instead");
  RecoveryOutcome outcome = run_pipeline(algorithm, inst, rule, controls);
  SingleRecovery single;
  single.alpha = outcome.alpha;
  single.iterations = outcome.iterations;
  single.time_ms = outcome.time_ms;
  single.residual = two_norm(sub(matvec(K, outcome.x_hat), y));
  single.x_hat = std::move(outcome.x_hat);
  return single;
}

void write_results_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows,
                       bool emit_timing) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "algorithm,m,n,s,snr_db,alpha,rerror,iterations,time_ms,success,seed\n";
  for (const auto& r : rows) {
    out << r.algorithm << "," << r.m << "," << r.n << "," << r.s << "," << format_double(r.snr_db)
        << "," << format_double(r.alpha) << "," << format_double(r.rerror) << "," << r.iterations
        << "," << format_double(emit_timing ? r.time_ms : 0.0) << "," << (r.success ? 1 : 0) << ","
        << r.seed << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty results file: " + path.string());
  if (line != "algorithm,m,n,s,snr_db,alpha,rerror,iterations,time_ms,success,seed")
    throw std::runtime_error("unexpected results header in " + path.string());
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    ResultRow r;
    auto next = [&]() -> std::string {
      if (!std::getline(ss, cell, ',')) throw std::runtime_error("short row in " + path.string());
      return cell;
    };
    r.algorithm = next();
    r.m = std::stoi(next());
    r.n = std::stoi(next());
    r.s = std::stoi(next());
    r.snr_db = std::stod(next());
    r.alpha = std::stod(next());
    r.rerror = std::stod(next());
    r.iterations = std::stol(next());
    r.time_ms = std::stod(next());
    r.success = std::stoi(next()) != 0;
    r.seed = std::stoull(next());
    rows.push_back(std::move(r));
  }
  return rows;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (j.contains("experiment")) cfg.experiment = j["experiment"].get<std::string>();
  if (j.contains("algorithms")) cfg.algorithms = j["algorithms"].get<std::vector<std::string>>();
  if (j.contains("sizes")) {
    cfg.sizes.clear();
    for (const auto& pr : j["sizes"]) cfg.sizes.emplace_back(pr.at(0).get<int>(), pr.at(1).get<int>());
  }
  if (j.contains("sparsity")) cfg.sparsity = j["sparsity"].get<std::vector<int>>();
  if (j.contains("sparsity_ratio")) cfg.sparsity_ratio = j["sparsity_ratio"].get<double>();
  if (j.contains("snr_db")) cfg.snr_db = j["snr_db"].get<double>();
  if (j.contains("trials")) cfg.trials = j["trials"].get<int>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("success_threshold")) cfg.success_threshold = j["success_threshold"].get<double>();
  if (j.contains("out")) cfg.output_dir = j["out"].get<std::string>();
  if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
  if (j.contains("emit_timing")) cfg.emit_timing = j["emit_timing"].get<bool>();
  if (j.contains("image_sizes")) cfg.image_sizes = j["image_sizes"].get<std::vector<int>>();
  if (j.contains("taus")) cfg.taus = j["taus"].get<std::vector<double>>();
  if (j.contains("rate_c")) cfg.rate_c = j["rate_c"].get<double>();
  if (j.contains("rate_points")) cfg.rate_points = j["rate_points"].get<int>();
  if (j.contains("max_iters")) cfg.max_iters = j["max_iters"].get<int>();
  if (j.contains("rel_change_tol")) cfg.rel_change_tol = j["rel_change_tol"].get<double>();

  auto parse_rule = [](const nlohmann::json& r) {
    const std::string kind = r.at("kind").get<std::string>();
    if (kind == "fixed") return AlphaRule::fixed(r.at("alpha").get<double>());
    if (kind == "oder-delta")
      return AlphaRule::oder_delta(r.contains("c") ? r["c"].get<double>() : 0.003);
    if (kind == "rate-two-thirds")
      return AlphaRule::rate_two_thirds(r.at("c").get<double>(), r.at("E").get<double>());
    if (kind == "rate-one-half")
      return AlphaRule::rate_one_half(r.at("c").get<double>(), r.at("E").get<double>());
    if (kind == "discrepancy") {
      DiscrepancyRule d;
      if (r.contains("tau_d")) d.tau_d = r["tau_d"].get<double>();
      if (r.contains("grid_lo")) d.grid_lo = r["grid_lo"].get<double>();
      if (r.contains("grid_hi")) d.grid_hi = r["grid_hi"].get<double>();
      if (r.contains("grid_points")) d.grid_points = r["grid_points"].get<int>();
      return AlphaRule::discrepancy_rule(d);
    }
    throw std::invalid_argument("unknown alpha rule kind: " + kind);
  };
  if (j.contains("alpha_rule")) cfg.alpha_rule = parse_rule(j["alpha_rule"]);
  if (j.contains("iterative_alpha_rule")) cfg.iterative_alpha_rule = parse_rule(j["iterative_alpha_rule"]);
  return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  auto rule_json = [](const AlphaRule& r) {
    nlohmann::json j;
    switch (r.kind) {
      case AlphaRule::Kind::fixed:
        j = {{"kind", "fixed"}, {"alpha", r.alpha}};
        break;
      case AlphaRule::Kind::oder_delta:
        j = {{"kind", "oder-delta"}, {"c", r.c}};
        break;
      case AlphaRule::Kind::rate_two_thirds:
        j = {{"kind", "rate-two-thirds"}, {"c", r.c}, {"E", r.E}};
        break;
      case AlphaRule::Kind::rate_one_half:
        j = {{"kind", "rate-one-half"}, {"c", r.c}, {"E", r.E}};
        break;
      case AlphaRule::Kind::discrepancy:
        j = {{"kind", "discrepancy"},
             {"tau_d", r.discrepancy.tau_d},
             {"grid_lo", r.discrepancy.grid_lo},
             {"grid_hi", r.discrepancy.grid_hi},
             {"grid_points", r.discrepancy.grid_points}};
        break;
    }
    return j;
  };
  nlohmann::json sizes = nlohmann::json::array();
  for (const auto& [m, n] : cfg.sizes) sizes.push_back({m, n});
  return nlohmann::json{{"experiment", cfg.experiment},
                        {"algorithms", cfg.algorithms},
                        {"sizes", sizes},
                        {"sparsity", cfg.sparsity},
                        {"sparsity_ratio", cfg.sparsity_ratio},
                        {"snr_db", cfg.snr_db},
                        {"trials", cfg.trials},
                        {"seed", cfg.seed},
                        {"alpha_rule", rule_json(cfg.alpha_rule)},
                        {"iterative_alpha_rule", rule_json(cfg.iterative_alpha_rule)},
                        {"success_threshold", cfg.success_threshold},
                        {"out", cfg.output_dir},
                        {"workers", cfg.workers},
                        {"emit_timing", cfg.emit_timing},
                        {"image_sizes", cfg.image_sizes},
                        {"taus", cfg.taus},
                        {"rate_c", cfg.rate_c},
                        {"rate_points", cfg.rate_points},
                        {"max_iters", cfg.max_iters},
                        {"rel_change_tol", cfg.rel_change_tol}};
}

std::string tool_version() { return "0.1.0"; }

}  // namespace spectral
