#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spectral/iterative.hpp"
#include "spectral/recovery.hpp"
#include "spectral/rng.hpp"
#include "spectral/thresholding.hpp"
#include "test_support.hpp"

using namespace spectral;
using testsupport::matrix_with_spectrum;
using testsupport::max_abs_diff;
using testsupport::random_matrix;

namespace {

IterativeSpec make_spec(IterativeAlgorithm alg, double alpha, int max_iters = 2000,
                        double tol = 1e-5) {
  IterativeSpec s;
  s.algorithm = alg;
  s.alpha = alpha;
  s.max_iters = max_iters;
  s.rel_change_tol = tol;
  return s;
}

}  // namespace

TEST_CASE("scale_operator leaves small operators alone") {
  const DenseMatrix K = DenseMatrix::diagonal({0.5, 0.2});
  auto [scaled, c] = scale_operator(K);
  CHECK(c == 1.0);
  CHECK(max_abs_diff(scaled, K) == 0.0);
}

TEST_CASE("scale_operator caps the spectral norm at 0.99") {
  const DenseMatrix K = random_matrix(40, 40, 11);
  auto [scaled, c] = scale_operator(K);
  const SingularSystem S0 = svd(K);
  const SingularSystem S1 = svd(scaled);
  CHECK(c == doctest::Approx(0.99 / S0.sigma.front()).epsilon(1e-12));
  CHECK(S1.sigma.front() == doctest::Approx(0.99).epsilon(1e-10));
  CHECK(cond2(S1) == doctest::Approx(cond2(S0)).epsilon(1e-10));
  CHECK_THROWS_AS(scale_operator(DenseMatrix(3, 3)), std::invalid_argument);
}

TEST_CASE("unscaled operators are rejected") {
  const DenseMatrix K = random_matrix(30, 30, 12);  // spectral norm ~ 11
  const RealVector y(30, 1.0), x0(30, 0.0);
  CHECK_THROWS_AS(ista(K, y, make_spec(IterativeAlgorithm::ista, 0.1), x0),
                  std::invalid_argument);
}

TEST_CASE("zero data fixes the zero iterate immediately") {
  const DenseMatrix K = DenseMatrix::diagonal({0.5, 0.25});
  const RealVector y(2, 0.0), x0(2, 0.0);
  for (auto alg : {IterativeAlgorithm::ista, IterativeAlgorithm::fista, IterativeAlgorithm::pg_half}) {
    auto [x, trace] = run_iterative(K, y, make_spec(alg, 0.1), x0);
    CHECK(two_norm(x) == 0.0);
    CHECK(trace.iterations_run == 1);
    CHECK(trace.converged);
  }
}

TEST_CASE("scalar fixed point of the soft-thresholding iteration") {
  // K = [0.5], y = [1], alpha = 0.1. The map is x -> S_0.1(0.75 x + 0.5).
  // Its fixed point solves 0.75 x + 0.5 - 0.05 = x, i.e. x = 1.8, which is
  // also the subgradient solution of (0.5 x - 1)^2 + 0.1 |x|.
  const DenseMatrix K(1, 1, {0.5});
  const RealVector y = {1.0};
  auto [x, trace] =
      ista(K, y, make_spec(IterativeAlgorithm::ista, 0.1, 5000, 1e-14), {0.0});
  CHECK(x[0] == doctest::Approx(1.8).epsilon(1e-10));
  CHECK(x[0] == doctest::Approx(soft_threshold(0.75 * x[0] + 0.5, 0.1)).epsilon(1e-12));
  const double oracle = testsupport::brute_force_min_1d(
      [](double v) {
        const double r = 0.5 * v - 1.0;
        return r * r + 0.1 * std::fabs(v);
      },
      -5.0, 5.0);
  CHECK(x[0] == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("ista limit matches the spectral soft-thresholding on diagonal operators") {
  SplitMix64 rng(75);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t dim = 3 + rng.next_below(4);
    RealVector sigma(dim), y(dim);
    for (double& s : sigma) s = 0.3 + 0.65 * rng.next_uniform();
    for (double& v : y) v = 2.0 * rng.next_normal();
    const double alpha = 0.05 + 0.3 * rng.next_uniform();
    const DenseMatrix K = DenseMatrix::diagonal(sigma);
    auto [x, trace] =
        ista(K, y, make_spec(IterativeAlgorithm::ista, alpha, 2000, 1e-13), RealVector(dim, 0.0));
    const RealVector direct = l1_svd(svd(K), y, alpha);
    CHECK(two_norm(sub(x, direct)) <= 1e-4);
  }
}

TEST_CASE("momentum sequence starts at the golden ratio") {
  CHECK(fista_momentum_next(1.0) == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-15));
}

TEST_CASE("momentum accelerates convergence on a fixed instance") {
  RealVector sigma(50);
  for (int i = 0; i < 50; ++i) sigma[i] = 0.95 * std::pow(0.93, i);
  const DenseMatrix K = matrix_with_spectrum(sigma, 76);
  SplitMix64 rng(77);
  RealVector y(50);
  for (double& v : y) v = rng.next_normal();
  const double alpha = 0.01;
  const RealVector x0(50, 0.0);
  auto [xi, ti] = ista(K, y, make_spec(IterativeAlgorithm::ista, alpha, 20000, 1e-10), x0);
  auto [xf, tf] = fista(K, y, make_spec(IterativeAlgorithm::fista, alpha, 20000, 1e-10), x0);
  CHECK(two_norm(sub(xi, xf)) <= 1e-4);
  CHECK(tf.iterations_run < ti.iterations_run);
}

TEST_CASE("pg with the square-root penalty") {
  const DenseMatrix K = DenseMatrix::diagonal({0.6, 0.4, 0.3});
  SUBCASE("huge alpha collapses to zero") {
    auto [x, trace] =
        pg_half(K, {0.5, -0.3, 0.2}, make_spec(IterativeAlgorithm::pg_half, 1e4), {0.0, 0.0, 0.0});
    CHECK(two_norm(x) == 0.0);
  }
  SUBCASE("limit satisfies first-order stationarity on nonzero coordinates") {
    const RealVector y = {1.2, -0.8, 0.9};
    const double alpha = 0.02;
    auto [x, trace] = pg_half(K, y, make_spec(IterativeAlgorithm::pg_half, alpha, 20000, 1e-14),
                              {0.0, 0.0, 0.0});
    const RealVector grad = matvec_transpose(K, sub(matvec(K, x), y));
    for (std::size_t i = 0; i < 3; ++i) {
      if (x[i] == 0.0) continue;
      const double r =
          2.0 * grad[i] + alpha * (x[i] > 0 ? 1.0 : -1.0) / (2.0 * std::sqrt(std::fabs(x[i])));
      CHECK(std::fabs(r) <= 1e-6);
    }
  }
}

TEST_CASE("ista objective never increases") {
  SplitMix64 rng(78);
  for (int rep = 0; rep < 20; ++rep) {
    RealVector sigma(30);
    for (double& s : sigma) s = 0.1 + 0.85 * rng.next_uniform();
    const DenseMatrix K = matrix_with_spectrum(sigma, 790 + rep);
    RealVector y(30);
    for (double& v : y) v = rng.next_normal();
    auto [x, trace] =
        ista(K, y, make_spec(IterativeAlgorithm::ista, 0.05, 300, 1e-12), RealVector(30, 0.0));
    for (std::size_t i = 1; i < trace.objective_history.size(); ++i)
      CHECK(trace.objective_history[i] <= trace.objective_history[i - 1] + 1e-12);
  }
}

TEST_CASE("iterates stay finite and respect the iteration cap") {
  const DenseMatrix K = matrix_with_spectrum({0.9, 0.5, 0.2, 0.05}, 80);
  SplitMix64 rng(81);
  RealVector y(4);
  for (double& v : y) v = rng.next_normal();
  for (auto alg : {IterativeAlgorithm::ista, IterativeAlgorithm::fista, IterativeAlgorithm::pg_half}) {
    auto [x, trace] = run_iterative(K, y, make_spec(alg, 1e-4, 50, 1e-16), RealVector(4, 0.0));
    CHECK(trace.iterations_run <= 50);
    for (double v : x) CHECK(std::isfinite(v));
  }
}

TEST_CASE("identical inputs give bit-identical iterate sequences") {
  const DenseMatrix K = matrix_with_spectrum({0.8, 0.55, 0.3}, 82);
  const RealVector y = {0.4, -0.2, 0.9};
  const RealVector x0 = {0.1, 0.0, -0.1};
  for (auto alg : {IterativeAlgorithm::ista, IterativeAlgorithm::fista, IterativeAlgorithm::pg_half}) {
    auto [xa, ta] = run_iterative(K, y, make_spec(alg, 0.03, 200, 1e-9), x0);
    auto [xb, tb] = run_iterative(K, y, make_spec(alg, 0.03, 200, 1e-9), x0);
    CHECK(ta.iterations_run == tb.iterations_run);
    CHECK(max_abs_diff(xa, xb) == 0.0);
    CHECK(ta.objective_history == tb.objective_history);
  }
}

TEST_CASE("spec validation") {
  IterativeSpec s;
  s.alpha = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.alpha = 1.0;
  s.max_iters = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.max_iters = 10;
  s.rel_change_tol = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
