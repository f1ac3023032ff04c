#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qksvm/diagnostics.hpp"
#include "qksvm/svm.hpp"

namespace qksvm {

// Verifier-side challenge state. The prover-facing serialization exposes the
// group, S and T only; hidden_s and seed stay in the verifier secret.
struct ChallengeDataset {
  GroupParams params;
  std::vector<LabeledSample> S;    // labeled training set
  std::vector<std::uint64_t> T;    // unlabeled test residues
  std::uint64_t hidden_s = 0;
  std::uint64_t seed = 0;
};

// Uniform random target, S via the efficient sample generator, T as fresh
// uniform residues. Deterministic given the seed.
ChallengeDataset make_challenge(const GroupParams& params, std::size_t m,
                                std::size_t m_test, std::uint64_t seed);

struct VerifyResult {
  bool accepted = false;
  double accuracy = 0.0;
};

// Scores against the hidden target; accepts iff strictly more than 99% of
// the labels are correct.
VerifyResult verify(std::span<const int> prover_labels,
                    const ChallengeDataset& challenge);

// Honest quantum-equipped prover: takes discrete logs of everything, then
// labels each test point by the nearer cluster under mean cyclic distance
// (ties toward +1; a single-label training set answers that label).
std::vector<int> prover_dlog(std::span<const LabeledSample> S,
                             std::span<const std::uint64_t> T,
                             const GroupParams& params);

// SVM-QKE prover: Gram build, bias transform, dual solve, predict.
std::vector<int> prover_svmqke(std::span<const LabeledSample> S,
                               std::span<const std::uint64_t> T,
                               const FeatureConfig& config,
                               const NoisePolicy& policy, double lambda);

// Classical-kernel prover over binary encodings.
std::vector<int> prover_classical(BaselineKind kind,
                                  std::span<const LabeledSample> S,
                                  std::span<const std::uint64_t> T,
                                  const GroupParams& params, double lambda);

}  // namespace qksvm
