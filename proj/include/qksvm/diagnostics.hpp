#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qksvm/svm.hpp"

namespace qksvm {

// -------------------------------------------------------------------------
// Ground-truth hyperplane
// -------------------------------------------------------------------------

// Unnormalized margin y<w*, x~> of the ground-truth halfspace hyperplane,
// scaled so margin-respecting points sit exactly at +-1. Collapses to
// y (2 (c/2^k)^2 - 1) where c is the halfspace overlap count, so values are
// exact rationals. Throws when y does not match the target's label.
double ground_truth_margin(std::uint64_t x, int y, const Concept& target,
                           const FeatureConfig& config);

// Same, keyed by the exponent (no discrete log); the label is implied.
double ground_truth_margin_from_exponent(std::uint64_t e, const Concept& target,
                                         const FeatureConfig& config);

// ||w*||^2 = (8 + 2 delta^2)/delta^2 with delta = delta_exact.
double ground_truth_norm_squared(const FeatureConfig& config);

// Same norm assembled from an explicitly materialized halfspace amplitude
// vector (p <= 2^10 guard); cross-checks the closed form.
double ground_truth_norm_squared_brute(const Concept& target,
                                       const FeatureConfig& config);

struct SlackStats {
  double xi_sq_sum = 0.0;  // ||xi*||^2 on the dataset
  double bound = 0.0;      // 4 m delta_nominal
  std::size_t m = 0;
};

// xi*_i = max(0, 1 - ground_truth_margin(x_i, y_i)).
SlackStats ground_truth_slack_stats(std::span<const LabeledSample> dataset,
                                    const Concept& target,
                                    const FeatureConfig& config);

// Primal loss of the solved hyperplane, 0.5 a'Qa + ||a||^2/(2 lambda),
// and of the ground-truth hyperplane, 0.5 ||w*||^2 + (lambda/2)||xi*||^2.
double primal_loss_from_alphas(std::span<const double> alphas,
                               const KernelMatrix& kernel_transformed,
                               std::span<const int> labels, double lambda);
double ground_truth_loss(std::span<const LabeledSample> dataset,
                         const Concept& target, const FeatureConfig& config,
                         double lambda);

// -------------------------------------------------------------------------
// Margin census
// -------------------------------------------------------------------------

struct MarginReport {
  double fraction_on_margin_plus = 0.0;  // halfspace overlap == delta_exact
  double fraction_zero_minus = 0.0;      // halfspace overlap == 0
  double violating_fraction = 0.0;       // anything in between
  double delta_exact = 0.0;
  std::uint64_t count_on_margin_plus = 0;
  std::uint64_t count_zero_minus = 0;
  std::uint64_t count_violating = 0;
  std::uint64_t population = 0;  // p - 1
  std::vector<double> margins;   // per-exponent, when requested
};

// Exhaustive census over Z_p^* (p <= 2^24). Categories are decided on exact
// integer overlap counts, never on floating comparisons.
MarginReport margin_census(const Concept& target, const FeatureConfig& config,
                           bool keep_margins = false);

// Sampled census for groups too large to enumerate; fractions are estimates,
// counts refer to the sample.
MarginReport margin_census_sampled(const Concept& target,
                                   const FeatureConfig& config,
                                   std::size_t count, std::uint64_t seed);

// -------------------------------------------------------------------------
// QP perturbation
// -------------------------------------------------------------------------

struct PerturbationReport {
  double eps = 0.0;           // ||Q' - Q||_F
  double lambda_floor = 0.0;  // 1/lambda
  double alpha_delta = 0.0;   // ||a' - a||_2
  double bound = 0.0;         // eps/(lambda_floor - eps) ||a||_2
  bool applicable = false;    // eps < lambda_floor
  double alpha_norm = 0.0;    // ||a||_2 of the exact solve
};

// Solves both duals and reports the perturbation inequality data.
PerturbationReport perturbation_check(const KernelMatrix& exact_kernel,
                                      const KernelMatrix& noisy_kernel,
                                      std::span<const int> labels, double lambda,
                                      const SolverOptions& options = {});

// -------------------------------------------------------------------------
// End-to-end noise robustness
// -------------------------------------------------------------------------

// Paired run: one training draw, trained once with the exact kernel and once
// under Shots(shots); both decision functions evaluated on a shared test set
// with matching prediction-time policies. Returns max |h - h'|.
double noise_robustness_run(const Concept& target, std::size_t m,
                            std::uint64_t shots, const FeatureConfig& config,
                            double lambda, std::size_t n_test,
                            std::uint64_t seed);

// Mean ||a||^2 tracking target 8 (1/delta^2 + m delta); logged, not gated.
double alpha_norm_reference(const FeatureConfig& config, std::size_t m);

// -------------------------------------------------------------------------
// Classical baselines
// -------------------------------------------------------------------------

enum class BaselineKind { kRbf, kLinear, kPoly };

const char* baseline_name(BaselineKind kind);

// x as its n-bit binary expansion scaled to unit norm.
std::vector<double> binary_encoding(std::uint64_t x, unsigned bits);

struct ClassicalSvm {
  BaselineKind kind = BaselineKind::kRbf;
  unsigned bits = 0;
  double sigma_sq = 1.0;  // rbf bandwidth (median heuristic)
  double lambda = 0.5;
  std::vector<std::vector<double>> train_enc;
  std::vector<int> train_y;
  std::vector<double> alphas;
};

// Trains the same L2 soft-margin dual on a classical kernel over binary
// encodings. rbf bandwidth: median of pairwise squared distances.
ClassicalSvm train_classical(BaselineKind kind,
                             std::span<const LabeledSample> train,
                             unsigned bits, double lambda,
                             const SolverOptions& options = {});

int classical_predict(const ClassicalSvm& model, std::uint64_t x);

double classical_baseline_accuracy(BaselineKind kind,
                                   std::span<const LabeledSample> train,
                                   std::span<const LabeledSample> test,
                                   unsigned bits, double lambda);

// Trivially separable control target: +1 iff the top bit of x is set.
int control_label(std::uint64_t x, const GroupParams& params);
std::vector<LabeledSample> make_control_dataset(const GroupParams& params,
                                                std::size_t m, Rng& rng);

}  // namespace qksvm
