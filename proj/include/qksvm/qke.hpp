#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qksvm/feature_kernel.hpp"
#include "qksvm/rng.hpp"

namespace qksvm {

// Kernel-entry estimation policy: exact values, or the R-shot measurement
// frequency simulated by binomial sampling.
struct NoisePolicy {
  enum class Mode { kExact, kShots };

  Mode mode = Mode::kExact;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;

  static NoisePolicy exact() { return NoisePolicy{}; }
  static NoisePolicy with_shots(std::uint64_t shots, std::uint64_t seed);
  bool is_exact() const { return mode == Mode::kExact; }
};

struct KernelMatrix {
  std::size_t m = 0;
  bool transformed = false;  // raw K0 vs K = (K0 + 1)/2
  NoisePolicy policy;
  std::vector<double> entries;  // row-major m x m

  double at(std::size_t i, std::size_t j) const { return entries[i * m + j]; }
  double& at(std::size_t i, std::size_t j) { return entries[i * m + j]; }
};

// Shot counts at or below this use exact binomial inversion; above it a
// rounded Gaussian with matching moments stands in (R = O(m^4) reaches ~1e9
// at desk scale, where the two are statistically indistinguishable).
inline constexpr std::uint64_t kExactSamplingShots = 1'000'000;

// Binomial(trials, q) draw. Endpoints q=0 and q=1 are exact in both regimes.
std::uint64_t sample_binomial(std::uint64_t trials, double q, Rng& rng);

// X/R with X ~ Binomial(R, q_true) in Shots mode; q_true itself in Exact
// mode. Additive error has mean 0 and variance q(1-q)/R <= 1/(4R).
double estimate_entry(double q_true, const NoisePolicy& policy, Rng& rng);

// Gram matrix of the raw kernel K0. The diagonal is set to 1 without
// estimation; each off-diagonal pair is estimated once from its own
// (seed, i, j) stream and mirrored, so entries are independent across pairs
// and identical regardless of evaluation order.
KernelMatrix build_kernel_matrix(std::span<const std::uint64_t> xs,
                                 const FeatureConfig& config,
                                 const NoisePolicy& policy);

// Entrywise K = (K0 + 1)/2; absorbs the bias term into the kernel.
KernelMatrix transform_bias(const KernelMatrix& raw);

}  // namespace qksvm
