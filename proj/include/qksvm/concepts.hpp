#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qksvm/group.hpp"
#include "qksvm/rng.hpp"

namespace qksvm {

// Secret-keyed labeling rule: +1 iff log_g x falls in the half-length cyclic
// interval of (p-1)/2 exponents starting at `key`.
struct Concept {
  std::uint64_t key = 0;  // in [0, p-2]
  GroupParams params;
};

struct LabeledSample {
  std::uint64_t x = 0;  // in [1, p-1]
  int y = 0;            // -1 or +1
};

Concept make_concept(std::uint64_t key, const GroupParams& params);

// Label straight from the exponent; needs no discrete log.
int label_from_exponent(std::uint64_t e, const Concept& target);

// Label via the discrete-log oracle.
int label(std::uint64_t x, const Concept& target);

// Draws e uniform in [0, p-2] and returns (g^e, label). The marginal of x is
// uniform on Z_p^* and no discrete log is ever taken.
LabeledSample generate_sample(const Concept& target, Rng& rng);

// m i.i.d. samples, with replacement.
std::vector<LabeledSample> generate_dataset(const Concept& target,
                                            std::size_t m, Rng& rng);

// Guard for full enumeration of Z_p^*.
inline constexpr std::uint64_t kExhaustiveLimit = std::uint64_t{1} << 24;

// Fraction of Z_p^* on which the classifier agrees with the target, by full
// enumeration. Walks x = g^e so the ground truth needs no discrete log; the
// classifier itself is invoked once per group element.
double exact_accuracy(const std::function<int(std::uint64_t)>& classifier,
                      const Concept& target);

// Sampling stand-in for groups too large to enumerate.
double sampled_accuracy(const std::function<int(std::uint64_t)>& classifier,
                        const Concept& target, std::size_t count,
                        std::uint64_t seed);

}  // namespace qksvm
