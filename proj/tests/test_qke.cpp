#include "qksvm/qke.hpp"

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "test_helpers.hpp"

using namespace qksvm;

TEST_CASE("estimate_entry contract") {
  Rng rng(1);
  const NoisePolicy exact = NoisePolicy::exact();
  CHECK(estimate_entry(0.37, exact, rng) == 0.37);
  const NoisePolicy shots = NoisePolicy::with_shots(64, 0);
  CHECK(estimate_entry(0.0, shots, rng) == 0.0);
  CHECK(estimate_entry(1.0, shots, rng) == 1.0);
  const NoisePolicy big = NoisePolicy::with_shots(1u << 30, 0);
  CHECK(estimate_entry(0.0, big, rng) == 0.0);  // Gaussian path, exact endpoint
  CHECK(estimate_entry(1.0, big, rng) == 1.0);
  CHECK_THROWS_AS(estimate_entry(-0.1, exact, rng), std::domain_error);
  CHECK_THROWS_AS(estimate_entry(1.1, exact, rng), std::domain_error);
  CHECK_THROWS_AS(NoisePolicy::with_shots(0, 0), std::domain_error);
}

TEST_CASE("binomial moments at R=100, q=0.5 over 1e5 draws") {
  Rng rng(99);
  const NoisePolicy policy = NoisePolicy::with_shots(100, 0);
  const std::size_t draws = 100000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < draws; ++i) {
    const double v = estimate_entry(0.5, policy, rng);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / draws;
  const double variance = sum_sq / draws - mean * mean;
  CHECK(std::fabs(mean - 0.5) < 0.001);
  CHECK(variance == doctest::Approx(0.0025).epsilon(0.10));
}

TEST_CASE("binomial inversion matches the analytic pmf") {
  Rng rng(7);
  const std::uint64_t trials = 10;
  const double q = 0.3;
  const std::size_t draws = 40000;
  std::vector<std::size_t> counts(trials + 1, 0);
  for (std::size_t i = 0; i < draws; ++i) ++counts[sample_binomial(trials, q, rng)];
  double chi_sq = 0.0;
  for (std::uint64_t k = 0; k <= trials; ++k) {
    const double pmf =
        std::exp(std::lgamma(11.0) - std::lgamma(k + 1.0) -
                 std::lgamma(11.0 - k) + k * std::log(q) +
                 (10.0 - k) * std::log1p(-q));
    const double expected = pmf * draws;
    const double d = counts[k] - expected;
    chi_sq += d * d / expected;
  }
  // df = 10; 36 is far beyond the 0.9999 quantile (~35.6 at df=10... use 40).
  CHECK(chi_sq < 40.0);
}

TEST_CASE("gaussian approximation keeps the right moments") {
  Rng rng(5);
  const std::uint64_t trials = 4'000'000;  // beyond the exact-inversion cutoff
  const double q = 0.3;
  const std::size_t draws = 20000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < draws; ++i) {
    const double v =
        static_cast<double>(sample_binomial(trials, q, rng)) / trials;
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / draws;
  const double variance = sum_sq / draws - mean * mean;
  CHECK(std::fabs(mean - q) < 1e-5);
  CHECK(variance ==
        doctest::Approx(q * (1 - q) / static_cast<double>(trials)).epsilon(0.1));
}

TEST_CASE("build_kernel_matrix exact mode reproduces kernel_exact") {
  const GroupParams params = make_group(23, 5);
  const FeatureConfig config = make_feature_config(2, params);
  const std::vector<std::uint64_t> xs = {5, 2, 18, 14, 1};
  const KernelMatrix kernel = build_kernel_matrix(xs, config, NoisePolicy::exact());
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const double expected = i == j ? 1.0 : kernel_exact(xs[i], xs[j], config);
      CHECK(kernel.at(i, j) == expected);
    }
}

TEST_CASE("noisy matrices are symmetric with unit diagonal and bounded error") {
  const GroupParams params = make_group(23, 5);
  const FeatureConfig config = make_feature_config(2, params);
  const std::vector<std::uint64_t> xs = {5, 2, 18, 14, 9};
  const KernelMatrix exact = build_kernel_matrix(xs, config, NoisePolicy::exact());
  const std::uint64_t shots = 400;
  const double bound = 5.0 / std::sqrt(static_cast<double>(shots));
  int within = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const KernelMatrix noisy =
        build_kernel_matrix(xs, config, NoisePolicy::with_shots(shots, seed));
    double max_err = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      CHECK(noisy.at(i, i) == 1.0);
      for (std::size_t j = 0; j < xs.size(); ++j) {
        CHECK(noisy.at(i, j) == noisy.at(j, i));
        max_err = std::max(max_err, std::fabs(noisy.at(i, j) - exact.at(i, j)));
      }
    }
    if (max_err <= bound) ++within;
  }
  CHECK(within >= 99);
}

TEST_CASE("kernel matrices are bit-identical under a fixed seed") {
  const GroupParams params = make_group(1019, 2);
  const FeatureConfig config = make_feature_config(4, params);
  Rng rng(12);
  std::vector<std::uint64_t> xs;
  for (int i = 0; i < 20; ++i) xs.push_back(1 + rng.next_below(params.order));
  const NoisePolicy policy = NoisePolicy::with_shots(5000, 77);
  const KernelMatrix a = build_kernel_matrix(xs, config, policy);
  const KernelMatrix b = build_kernel_matrix(xs, config, policy);
  CHECK(a.entries == b.entries);
}

TEST_CASE("transform_bias") {
  KernelMatrix raw;
  raw.m = 2;
  raw.entries = {1.0, 0.0, 0.0, 1.0};
  const KernelMatrix k = transform_bias(raw);
  CHECK(k.transformed);
  CHECK(k.at(0, 0) == 1.0);   // fixed point
  CHECK(k.at(0, 1) == 0.5);   // 0 -> 1/2
  CHECK_THROWS_AS(transform_bias(k), std::domain_error);
}

TEST_CASE("transform halves the additive noise into [-1/2, 1/2]") {
  const GroupParams params = make_group(23, 5);
  const FeatureConfig config = make_feature_config(2, params);
  const std::vector<std::uint64_t> xs = {5, 2, 18, 14, 9};
  const KernelMatrix exact = build_kernel_matrix(xs, config, NoisePolicy::exact());
  const KernelMatrix noisy =
      build_kernel_matrix(xs, config, NoisePolicy::with_shots(50, 3));
  const KernelMatrix exact_t = transform_bias(exact);
  const KernelMatrix noisy_t = transform_bias(noisy);
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const double raw_err = noisy.at(i, j) - exact.at(i, j);
      const double transformed_err = noisy_t.at(i, j) - exact_t.at(i, j);
      CHECK(transformed_err == doctest::Approx(raw_err / 2.0).epsilon(1e-12));
      CHECK(transformed_err >= -0.5);
      CHECK(transformed_err <= 0.5);
    }
}
