#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "qksvm/concepts.hpp"
#include "qksvm/qke.hpp"

namespace qksvm {

struct SolverOptions {
  double tolerance = 1e-8;          // KKT residual at convergence
  std::size_t max_sweeps = 1'000'000;
  std::vector<double> warm_start;   // empty = start from zero
  bool record_objective_trace = false;
};

struct DualSolution {
  std::vector<double> alphas;
  std::size_t sweeps = 0;
  double residual = 0.0;
  double objective = 0.0;
  std::vector<double> objective_trace;  // per sweep, when recorded
};

class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(double residual, std::size_t sweeps);
  double residual() const { return residual_; }
  std::size_t sweeps() const { return sweeps_; }

 private:
  double residual_;
  std::size_t sweeps_;
};

// Unique maximizer of 1'a - 0.5 a'(Q + I/lambda)a over a >= 0, where
// Q_ij = y_i y_j K_ij, by projected cyclic coordinate ascent with
// closed-form coordinate updates. Requires a transformed kernel and
// lambda in (0, 1]. Throws SolverFailure past the sweep cap.
DualSolution solve_dual(const KernelMatrix& kernel, std::span<const int> labels,
                        double lambda, const SolverOptions& options = {});

// max_i |min(g_i, a_i g_i)| with g_i = (Qa)_i + a_i/lambda - 1; zero exactly
// at the optimum (dual feasibility plus complementary slackness).
double kkt_residual(std::span<const double> alphas, const KernelMatrix& kernel,
                    std::span<const int> labels, double lambda);

// 1'a - 0.5 a'(Q + I/lambda)a.
double dual_objective(std::span<const double> alphas, const KernelMatrix& kernel,
                      std::span<const int> labels, double lambda);

// xi = a / lambda elementwise (KKT identity at the optimum).
std::vector<double> slacks_from_alphas(std::span<const double> alphas,
                                       double lambda);

// Trained model: everything needed to evaluate the decision function.
struct SvmModel {
  std::vector<double> alphas;
  double lambda = 0.5;
  std::vector<std::uint64_t> train_x;
  std::vector<int> train_y;
  FeatureConfig config;
  NoisePolicy policy;  // prediction-time kernel estimation
  std::size_t solver_sweeps = 0;
  double solver_residual = 0.0;
  // Derived, not serialized: feature-interval starts of the training points.
  std::vector<std::uint64_t> train_starts;
};

// Recomputes the derived caches (after deserialization).
void refresh_model_cache(SvmModel& model);

// Full training pass: raw Gram under `policy`, bias transform, dual solve.
SvmModel train_svm(std::span<const LabeledSample> samples,
                   const FeatureConfig& config, const NoisePolicy& policy,
                   double lambda, const SolverOptions& options = {});

// h'(x) = sum_i a_i y_i (K0'(x, x_i) + 1)/2 with K0' freshly estimated under
// the model's policy (exact mode gives the noiseless h).
double decision_value(std::uint64_t x, const SvmModel& model);

// sign of decision_value; exact zero maps to +1.
int predict(std::uint64_t x, const SvmModel& model);

}  // namespace qksvm
