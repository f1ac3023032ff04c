#include "qksvm/feature_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace qksvm {

FeatureConfig make_feature_config(unsigned k, const GroupParams& params) {
  if (params.order == 0)
    throw std::domain_error("make_feature_config: invalid group");
  if (k < 1 || k >= 63)
    throw std::domain_error("make_feature_config: k outside [1, 62]");
  const std::uint64_t length = std::uint64_t{1} << k;
  if (2 * length >= params.order)
    throw std::domain_error("make_feature_config: 2^{k+1} must be < p-1");
  return FeatureConfig{k, params};
}

ExponentInterval interval_of(std::uint64_t x, const FeatureConfig& config) {
  if (x < 1 || x > config.params.p - 1)
    throw std::domain_error("interval_of: x outside [1, p-1]");
  return ExponentInterval{discrete_log(x, config.params),
                          config.interval_length(), config.params.order};
}

std::uint64_t cyclic_overlap(const ExponentInterval& a,
                             const ExponentInterval& b) {
  if (a.order != b.order || a.order == 0)
    throw std::domain_error("cyclic_overlap: mismatched order");
  if (a.length > a.order || b.length > b.order)
    throw std::domain_error("cyclic_overlap: interval longer than the cycle");
  const std::uint64_t order = a.order;
  // Shift so a starts at 0; b then covers [bs, bs+lb) and possibly one
  // wrapped arc [0, bs+lb-order).
  const std::uint64_t bs =
      b.start >= a.start ? b.start - a.start : b.start + order - a.start;
  const std::uint64_t la = a.length;
  const std::uint64_t lb = b.length;
  std::uint64_t total = 0;
  if (bs < la) total += std::min(bs + lb, la) - bs;
  if (bs + lb > order) total += std::min(bs + lb - order, la);
  return total;
}

std::uint64_t kernel_overlap(std::uint64_t x1, std::uint64_t x2,
                             const FeatureConfig& config) {
  return cyclic_overlap(interval_of(x1, config), interval_of(x2, config));
}

double kernel_from_starts(std::uint64_t start1, std::uint64_t start2,
                          const FeatureConfig& config) {
  const ExponentInterval a{start1, config.interval_length(),
                           config.params.order};
  const ExponentInterval b{start2, config.interval_length(),
                           config.params.order};
  const double ratio = static_cast<double>(cyclic_overlap(a, b)) /
                       static_cast<double>(config.interval_length());
  return ratio * ratio;
}

double kernel_exact(std::uint64_t x1, std::uint64_t x2,
                    const FeatureConfig& config) {
  const double ratio = static_cast<double>(kernel_overlap(x1, x2, config)) /
                       static_cast<double>(config.interval_length());
  return ratio * ratio;
}

std::uint64_t halfspace_overlap_count(std::uint64_t e, const Concept& target,
                                      const FeatureConfig& config) {
  if (target.params.p != config.params.p)
    throw std::domain_error("halfspace_overlap: target/config group mismatch");
  const std::uint64_t order = config.params.order;
  const ExponentInterval feature{e, config.interval_length(), order};
  const ExponentInterval halfspace{target.key, order / 2, order};
  return cyclic_overlap(feature, halfspace);
}

double halfspace_overlap(std::uint64_t x, const Concept& target,
                         const FeatureConfig& config) {
  const ExponentInterval feature = interval_of(x, config);
  const std::uint64_t c = halfspace_overlap_count(feature.start, target, config);
  const double denom = static_cast<double>(config.params.order / 2) *
                       static_cast<double>(config.interval_length());
  return static_cast<double>(c) * static_cast<double>(c) / denom;
}

std::uint64_t brute_force_overlap(std::uint64_t x1, std::uint64_t x2,
                                  const FeatureConfig& config) {
  const GroupParams& params = config.params;
  if (params.p > kBruteForceLimit)
    throw std::domain_error("brute_force_kernel: p above the amplitude-vector guard");
  if (x1 < 1 || x1 > params.p - 1 || x2 < 1 || x2 > params.p - 1)
    throw std::domain_error("brute_force_kernel: input outside [1, p-1]");
  const std::uint64_t length = config.interval_length();
  std::vector<std::uint8_t> support(params.p, 0);
  std::uint64_t r = x1;
  for (std::uint64_t i = 0; i < length; ++i) {
    support[r] = 1;
    r = mul_mod(r, params.g, params.p);
  }
  std::uint64_t common = 0;
  r = x2;
  for (std::uint64_t i = 0; i < length; ++i) {
    common += support[r];
    r = mul_mod(r, params.g, params.p);
  }
  return common;
}

double brute_force_kernel(std::uint64_t x1, std::uint64_t x2,
                          const FeatureConfig& config) {
  const GroupParams& params = config.params;
  if (params.p > kBruteForceLimit)
    throw std::domain_error("brute_force_kernel: p above the amplitude-vector guard");
  if (x1 < 1 || x1 > params.p - 1 || x2 < 1 || x2 > params.p - 1)
    throw std::domain_error("brute_force_kernel: input outside [1, p-1]");
  const std::uint64_t length = config.interval_length();
  // Unnormalized amplitude vectors over the residue orbits; the 1/2^k
  // normalization is applied to the accumulated inner product so the result
  // is bit-identical to the exact rational (c/2^k)^2.
  std::vector<double> amp1(params.p, 0.0);
  std::vector<double> amp2(params.p, 0.0);
  std::uint64_t r1 = x1;
  std::uint64_t r2 = x2;
  for (std::uint64_t i = 0; i < length; ++i) {
    amp1[r1] = 1.0;
    amp2[r2] = 1.0;
    r1 = mul_mod(r1, params.g, params.p);
    r2 = mul_mod(r2, params.g, params.p);
  }
  double inner = 0.0;
  for (std::uint64_t z = 1; z < params.p; ++z) inner += amp1[z] * amp2[z];
  inner /= static_cast<double>(length);
  return inner * inner;
}

int decide_dlp_promise(std::uint64_t y, const GroupParams& params,
                       double threshold) {
  if (params.n < 4)
    throw std::domain_error("decide_dlp_promise: group too small for k = n-3");
  if (params.order / 16 == 0)
    throw std::domain_error("decide_dlp_promise: empty promise intervals");
  const FeatureConfig config = make_feature_config(params.n - 3, params);
  const std::uint64_t reference = pow_mod(params.g, (params.p + 1) / 2, params.p);
  const double q = kernel_exact(y, reference, config);
  return q < threshold ? -1 : +1;
}

}  // namespace qksvm
