#pragma once

#include <cstdint>

#include "qksvm/concepts.hpp"
#include "qksvm/group.hpp"

namespace qksvm {

// Cyclic interval of exponents mod `order`.
struct ExponentInterval {
  std::uint64_t start = 0;
  std::uint64_t length = 0;
  std::uint64_t order = 0;
};

// Interval feature map: x is mapped to the exponent interval
// [log_g x, log_g x + 2^k - 1] of length 2^k.
struct FeatureConfig {
  unsigned k = 1;
  GroupParams params;

  std::uint64_t interval_length() const { return std::uint64_t{1} << k; }

  // Exact overlap value of a feature interval fully contained in a
  // halfspace: 2^{k+1}/(p-1). Equalities in tests use this one.
  double delta_exact() const {
    return static_cast<double>(2 * interval_length()) /
           static_cast<double>(params.order);
  }

  // The margin scale as reported asymptotically: 2^{k+1}/p.
  double delta_nominal() const {
    return static_cast<double>(2 * interval_length()) /
           static_cast<double>(params.p);
  }
};

// Validates k >= 1 and 2^{k+1} < p-1 (feature interval strictly smaller
// than a halfspace).
FeatureConfig make_feature_config(unsigned k, const GroupParams& params);

ExponentInterval interval_of(std::uint64_t x, const FeatureConfig& config);

// Exact cardinality of the intersection of two cyclic residue intervals.
// Handles the up-to-two-arc intersection produced by wraparound.
std::uint64_t cyclic_overlap(const ExponentInterval& a,
                             const ExponentInterval& b);

// Number of residues shared by the feature intervals of x1 and x2.
std::uint64_t kernel_overlap(std::uint64_t x1, std::uint64_t x2,
                             const FeatureConfig& config);

// K0(x1, x2) = (overlap / 2^k)^2.
double kernel_exact(std::uint64_t x1, std::uint64_t x2,
                    const FeatureConfig& config);

// K0 from precomputed interval starts (Gram assembly avoids repeated logs).
double kernel_from_starts(std::uint64_t start1, std::uint64_t start2,
                          const FeatureConfig& config);

// Squared overlap of the feature state of x with the target's halfspace
// state: overlap^2 / (((p-1)/2) * 2^k).
double halfspace_overlap(std::uint64_t x, const Concept& target,
                         const FeatureConfig& config);

// Overlap count between the feature interval starting at exponent e and the
// halfspace interval [s, s + (p-3)/2].
std::uint64_t halfspace_overlap_count(std::uint64_t e, const Concept& target,
                                      const FeatureConfig& config);

// Guard for materializing length-(p-1) amplitude vectors.
inline constexpr std::uint64_t kBruteForceLimit = std::uint64_t{1} << 14;

// Independent oracle for kernel_exact: materializes the amplitude vectors
// over {x * g^i mod p : 0 <= i < 2^k} by repeated multiplication and returns
// the squared inner product. Shares no code with the interval path.
double brute_force_kernel(std::uint64_t x1, std::uint64_t x2,
                          const FeatureConfig& config);
std::uint64_t brute_force_overlap(std::uint64_t x1, std::uint64_t x2,
                                  const FeatureConfig& config);

// Decides the promise problem "log_g y in [1, (p-1)/16] vs
// [(p-1)/2+1, (p-1)/2+(p-1)/16]" from one exact kernel value against the
// reference point g^{(p+1)/2} with k = n-3. Returns -1 for the first case
// (kernel 0), +1 for the second (kernel >= 1/16). Output is unspecified on
// inputs violating the promise.
int decide_dlp_promise(std::uint64_t y, const GroupParams& params,
                       double threshold = 1.0 / 32.0);

}  // namespace qksvm
