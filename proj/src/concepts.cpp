#include "qksvm/concepts.hpp"

#include <stdexcept>

namespace qksvm {

Concept make_concept(std::uint64_t key, const GroupParams& params) {
  if (params.order == 0) throw std::domain_error("make_concept: invalid group");
  if (key >= params.order)
    throw std::domain_error("make_concept: key outside [0, p-2]");
  return Concept{key, params};
}

int label_from_exponent(std::uint64_t e, const Concept& target) {
  const std::uint64_t order = target.params.order;
  const std::uint64_t offset =
      e >= target.key ? e - target.key : e + order - target.key;
  return offset < order / 2 ? +1 : -1;
}

int label(std::uint64_t x, const Concept& target) {
  if (x < 1 || x > target.params.p - 1)
    throw std::domain_error("label: x outside [1, p-1]");
  return label_from_exponent(discrete_log(x, target.params), target);
}

LabeledSample generate_sample(const Concept& target, Rng& rng) {
  const std::uint64_t e = rng.next_below(target.params.order);
  return LabeledSample{pow_mod(target.params.g, e, target.params.p),
                       label_from_exponent(e, target)};
}

std::vector<LabeledSample> generate_dataset(const Concept& target,
                                            std::size_t m, Rng& rng) {
  if (m == 0) throw std::domain_error("generate_dataset: m must be >= 1");
  std::vector<LabeledSample> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) out.push_back(generate_sample(target, rng));
  return out;
}

double exact_accuracy(const std::function<int(std::uint64_t)>& classifier,
                      const Concept& target) {
  const GroupParams& params = target.params;
  if (params.p > kExhaustiveLimit)
    throw std::domain_error(
        "exact_accuracy: p above the enumeration guard, use sampled_accuracy");
  std::uint64_t agree = 0;
  std::uint64_t x = 1;
  for (std::uint64_t e = 0; e < params.order; ++e) {
    if (classifier(x) == label_from_exponent(e, target)) ++agree;
    x = mul_mod(x, params.g, params.p);
  }
  return static_cast<double>(agree) / static_cast<double>(params.order);
}

double sampled_accuracy(const std::function<int(std::uint64_t)>& classifier,
                        const Concept& target, std::size_t count,
                        std::uint64_t seed) {
  if (count == 0) throw std::domain_error("sampled_accuracy: count must be >= 1");
  const GroupParams& params = target.params;
  Rng rng(stream_seed({0x61636375ull, seed}));
  std::uint64_t agree = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t e = rng.next_below(params.order);
    const std::uint64_t x = pow_mod(params.g, e, params.p);
    if (classifier(x) == label_from_exponent(e, target)) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(count);
}

}  // namespace qksvm
