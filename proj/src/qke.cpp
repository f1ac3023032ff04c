#include "qksvm/qke.hpp"

#include <cmath>
#include <stdexcept>

namespace qksvm {

NoisePolicy NoisePolicy::with_shots(std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw std::domain_error("NoisePolicy: shots must be >= 1");
  NoisePolicy policy;
  policy.mode = Mode::kShots;
  policy.shots = shots;
  policy.seed = seed;
  return policy;
}

namespace {

// Exact inversion sampler, enumerating pmf mass outward from the mode in a
// fixed interleaved order. Expected work is O(sqrt(R q (1-q))).
std::uint64_t binomial_inversion(std::uint64_t trials, double q, Rng& rng) {
  const double n = static_cast<double>(trials);
  std::uint64_t mode = static_cast<std::uint64_t>((n + 1.0) * q);
  if (mode > trials) mode = trials;
  const double log_q = std::log(q);
  const double log_1q = std::log1p(-q);
  const double k = static_cast<double>(mode);
  const double log_pmf_mode = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                              std::lgamma(n - k + 1.0) + k * log_q +
                              (n - k) * log_1q;
  const double u = rng.next_unit();
  double acc = std::exp(log_pmf_mode);
  if (u < acc) return mode;
  std::uint64_t lo = mode;
  std::uint64_t hi = mode;
  double p_lo = acc;
  double p_hi = acc;
  const double odds = q / (1.0 - q);
  while (lo > 0 || hi < trials) {
    if (lo > 0) {
      p_lo *= static_cast<double>(lo) / ((n - static_cast<double>(lo) + 1.0) * odds);
      --lo;
      acc += p_lo;
      if (u < acc) return lo;
    }
    if (hi < trials) {
      p_hi *= (n - static_cast<double>(hi)) * odds / (static_cast<double>(hi) + 1.0);
      ++hi;
      acc += p_hi;
      if (u < acc) return hi;
    }
  }
  // Unreachable except for floating residue in the extreme tails.
  return mode;
}

}  // namespace

std::uint64_t sample_binomial(std::uint64_t trials, double q, Rng& rng) {
  if (trials == 0) throw std::domain_error("sample_binomial: trials must be >= 1");
  if (q < 0.0 || q > 1.0)
    throw std::domain_error("sample_binomial: q outside [0, 1]");
  if (q == 0.0) return 0;
  if (q == 1.0) return trials;
  if (trials <= kExactSamplingShots) return binomial_inversion(trials, q, rng);
  const double mean = static_cast<double>(trials) * q;
  const double sd = std::sqrt(static_cast<double>(trials) * q * (1.0 - q));
  double v = std::round(mean + sd * rng.next_gaussian());
  if (v < 0.0) v = 0.0;
  const double cap = static_cast<double>(trials);
  if (v > cap) v = cap;
  return static_cast<std::uint64_t>(v);
}

double estimate_entry(double q_true, const NoisePolicy& policy, Rng& rng) {
  if (q_true < 0.0 || q_true > 1.0)
    throw std::domain_error("estimate_entry: q_true outside [0, 1]");
  if (policy.is_exact()) return q_true;
  return static_cast<double>(sample_binomial(policy.shots, q_true, rng)) /
         static_cast<double>(policy.shots);
}

KernelMatrix build_kernel_matrix(std::span<const std::uint64_t> xs,
                                 const FeatureConfig& config,
                                 const NoisePolicy& policy) {
  const std::size_t m = xs.size();
  if (m == 0) throw std::domain_error("build_kernel_matrix: empty sample list");
  KernelMatrix kernel;
  kernel.m = m;
  kernel.transformed = false;
  kernel.policy = policy;
  kernel.entries.assign(m * m, 0.0);
  std::vector<std::uint64_t> starts;
  starts.reserve(m);
  for (const std::uint64_t x : xs) starts.push_back(interval_of(x, config).start);
  for (std::size_t i = 0; i < m; ++i) {
    kernel.at(i, i) = 1.0;
    for (std::size_t j = i + 1; j < m; ++j) {
      const double q = kernel_from_starts(starts[i], starts[j], config);
      double value = q;
      if (!policy.is_exact()) {
        Rng pair_rng(stream_seed({policy.seed, static_cast<std::uint64_t>(i),
                                  static_cast<std::uint64_t>(j)}));
        value = estimate_entry(q, policy, pair_rng);
      }
      kernel.at(i, j) = value;
      kernel.at(j, i) = value;
    }
  }
  return kernel;
}

KernelMatrix transform_bias(const KernelMatrix& raw) {
  if (raw.transformed)
    throw std::domain_error("transform_bias: matrix already transformed");
  KernelMatrix kernel = raw;
  kernel.transformed = true;
  for (double& v : kernel.entries) v = 0.5 * (v + 1.0);
  return kernel;
}

}  // namespace qksvm
