#include "qksvm/challenge.hpp"

#include <stdexcept>

namespace qksvm {

ChallengeDataset make_challenge(const GroupParams& params, std::size_t m,
                                std::size_t m_test, std::uint64_t seed) {
  if (m == 0 || m_test == 0)
    throw std::domain_error("make_challenge: m and m_test must be >= 1");
  Rng rng(stream_seed({0x6368616Cull, seed}));
  ChallengeDataset challenge;
  challenge.params = params;
  challenge.seed = seed;
  challenge.hidden_s = rng.next_below(params.order);
  const Concept target = make_concept(challenge.hidden_s, params);
  challenge.S = generate_dataset(target, m, rng);
  challenge.T.reserve(m_test);
  for (std::size_t i = 0; i < m_test; ++i)
    challenge.T.push_back(1 + rng.next_below(params.order));
  return challenge;
}

VerifyResult verify(std::span<const int> prover_labels,
                    const ChallengeDataset& challenge) {
  if (prover_labels.size() != challenge.T.size())
    throw std::domain_error("verify: label count does not match test set");
  const Concept target = make_concept(challenge.hidden_s, challenge.params);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < challenge.T.size(); ++i)
    if (prover_labels[i] == label(challenge.T[i], target)) ++correct;
  VerifyResult result;
  result.accuracy =
      static_cast<double>(correct) / static_cast<double>(challenge.T.size());
  result.accepted = result.accuracy > 0.99;
  return result;
}

std::vector<int> prover_dlog(std::span<const LabeledSample> S,
                             std::span<const std::uint64_t> T,
                             const GroupParams& params) {
  std::vector<std::uint64_t> logs_plus;
  std::vector<std::uint64_t> logs_minus;
  for (const LabeledSample& s : S)
    (s.y > 0 ? logs_plus : logs_minus).push_back(discrete_log(s.x, params));
  std::vector<int> out;
  out.reserve(T.size());
  for (const std::uint64_t t : T) {
    if (logs_plus.empty()) {
      out.push_back(-1);
      continue;
    }
    if (logs_minus.empty()) {
      out.push_back(+1);
      continue;
    }
    const std::uint64_t e = discrete_log(t, params);
    unsigned __int128 sum_plus = 0;
    unsigned __int128 sum_minus = 0;
    for (const std::uint64_t a : logs_plus)
      sum_plus += cyclic_distance(e, a, params.order);
    for (const std::uint64_t a : logs_minus)
      sum_minus += cyclic_distance(e, a, params.order);
    // mean_+ <= mean_- as an exact cross-multiplied comparison; tie -> +1.
    const bool plus_nearer =
        sum_plus * logs_minus.size() <= sum_minus * logs_plus.size();
    out.push_back(plus_nearer ? +1 : -1);
  }
  return out;
}

std::vector<int> prover_svmqke(std::span<const LabeledSample> S,
                               std::span<const std::uint64_t> T,
                               const FeatureConfig& config,
                               const NoisePolicy& policy, double lambda) {
  const SvmModel model = train_svm(S, config, policy, lambda);
  std::vector<int> out;
  out.reserve(T.size());
  for (const std::uint64_t t : T) out.push_back(predict(t, model));
  return out;
}

std::vector<int> prover_classical(BaselineKind kind,
                                  std::span<const LabeledSample> S,
                                  std::span<const std::uint64_t> T,
                                  const GroupParams& params, double lambda) {
  const ClassicalSvm model = train_classical(kind, S, params.n, lambda);
  std::vector<int> out;
  out.reserve(T.size());
  for (const std::uint64_t t : T) out.push_back(classical_predict(model, t));
  return out;
}

}  // namespace qksvm
