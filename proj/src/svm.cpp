#include "qksvm/svm.hpp"

#include <algorithm>
#include <cmath>

namespace qksvm {

SolverFailure::SolverFailure(double residual, std::size_t sweeps)
    : std::runtime_error("solve_dual: no convergence after " +
                         std::to_string(sweeps) +
                         " sweeps, KKT residual " + std::to_string(residual)),
      residual_(residual),
      sweeps_(sweeps) {}

namespace {

void check_problem(const KernelMatrix& kernel, std::span<const int> labels,
                   double lambda) {
  if (!kernel.transformed)
    throw std::domain_error("solve_dual: kernel must be bias-transformed");
  if (kernel.m == 0 || labels.size() != kernel.m)
    throw std::domain_error("solve_dual: label count does not match kernel");
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::domain_error("solve_dual: lambda outside (0, 1]");
  for (const int y : labels)
    if (y != 1 && y != -1) throw std::domain_error("solve_dual: labels must be +-1");
}

std::vector<double> signed_gram(const KernelMatrix& kernel,
                                std::span<const int> labels) {
  const std::size_t m = kernel.m;
  std::vector<double> q(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      q[i * m + j] = static_cast<double>(labels[i] * labels[j]) * kernel.at(i, j);
  return q;
}

double residual_from_gradient(std::span<const double> alphas,
                              std::span<const double> qa, double inv_lambda) {
  double res = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double g = qa[i] + alphas[i] * inv_lambda - 1.0;
    const double v = std::fabs(std::min(g, alphas[i] * g));
    res = std::max(res, v);
  }
  return res;
}

}  // namespace

DualSolution solve_dual(const KernelMatrix& kernel, std::span<const int> labels,
                        double lambda, const SolverOptions& options) {
  check_problem(kernel, labels, lambda);
  const std::size_t m = kernel.m;
  const double inv_lambda = 1.0 / lambda;
  const std::vector<double> q = signed_gram(kernel, labels);
  // A noisy Gram need not be PSD; coordinate steps only need positive
  // curvature per coordinate, which the unit diagonal plus 1/lambda supplies.
  for (std::size_t i = 0; i < m; ++i)
    if (q[i * m + i] + inv_lambda <= 0.0)
      throw std::domain_error("solve_dual: nonpositive regularized diagonal");

  std::vector<double> alpha(m, 0.0);
  if (!options.warm_start.empty()) {
    if (options.warm_start.size() != m)
      throw std::domain_error("solve_dual: warm start size mismatch");
    alpha = options.warm_start;
    for (double& a : alpha) a = std::max(a, 0.0);
  }
  std::vector<double> qa(m, 0.0);
  auto refresh_qa = [&] {
    std::fill(qa.begin(), qa.end(), 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      if (alpha[j] == 0.0) continue;
      const double* row = &q[j * m];
      const double aj = alpha[j];
      for (std::size_t i = 0; i < m; ++i) qa[i] += aj * row[i];
    }
  };
  refresh_qa();

  DualSolution solution;
  double residual = residual_from_gradient(alpha, qa, inv_lambda);
  for (std::size_t sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    for (std::size_t i = 0; i < m; ++i) {
      const double grad = 1.0 - qa[i] - alpha[i] * inv_lambda;
      double next = alpha[i] + grad / (q[i * m + i] + inv_lambda);
      if (next < 0.0) next = 0.0;
      const double delta = next - alpha[i];
      if (delta != 0.0) {
        alpha[i] = next;
        const double* row = &q[i * m];
        for (std::size_t j = 0; j < m; ++j) qa[j] += delta * row[j];
      }
    }
    // Periodic refresh keeps incremental drift far below the tolerance.
    if (sweep % 256 == 0) refresh_qa();
    residual = residual_from_gradient(alpha, qa, inv_lambda);
    if (options.record_objective_trace) {
      double lin = 0.0, quad = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        lin += alpha[i];
        quad += alpha[i] * (qa[i] + alpha[i] * inv_lambda);
      }
      solution.objective_trace.push_back(lin - 0.5 * quad);
    }
    if (residual <= options.tolerance) {
      solution.alphas = std::move(alpha);
      solution.sweeps = sweep;
      solution.residual = residual;
      solution.objective =
          dual_objective(solution.alphas, kernel, labels, lambda);
      return solution;
    }
  }
  throw SolverFailure(residual, options.max_sweeps);
}

double kkt_residual(std::span<const double> alphas, const KernelMatrix& kernel,
                    std::span<const int> labels, double lambda) {
  check_problem(kernel, labels, lambda);
  if (alphas.size() != kernel.m)
    throw std::domain_error("kkt_residual: alpha size mismatch");
  const std::size_t m = kernel.m;
  const std::vector<double> q = signed_gram(kernel, labels);
  std::vector<double> qa(m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) qa[i] += q[i * m + j] * alphas[j];
  return residual_from_gradient(alphas, qa, 1.0 / lambda);
}

double dual_objective(std::span<const double> alphas, const KernelMatrix& kernel,
                      std::span<const int> labels, double lambda) {
  check_problem(kernel, labels, lambda);
  if (alphas.size() != kernel.m)
    throw std::domain_error("dual_objective: alpha size mismatch");
  const std::size_t m = kernel.m;
  const std::vector<double> q = signed_gram(kernel, labels);
  double lin = 0.0;
  double quad = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    lin += alphas[i];
    double row = 0.0;
    for (std::size_t j = 0; j < m; ++j) row += q[i * m + j] * alphas[j];
    quad += alphas[i] * (row + alphas[i] / lambda);
  }
  return lin - 0.5 * quad;
}

std::vector<double> slacks_from_alphas(std::span<const double> alphas,
                                       double lambda) {
  std::vector<double> xi(alphas.begin(), alphas.end());
  for (double& v : xi) v /= lambda;
  return xi;
}

void refresh_model_cache(SvmModel& model) {
  model.train_starts.clear();
  model.train_starts.reserve(model.train_x.size());
  for (const std::uint64_t x : model.train_x)
    model.train_starts.push_back(interval_of(x, model.config).start);
}

SvmModel train_svm(std::span<const LabeledSample> samples,
                   const FeatureConfig& config, const NoisePolicy& policy,
                   double lambda, const SolverOptions& options) {
  SvmModel model;
  model.lambda = lambda;
  model.config = config;
  model.policy = policy;
  model.train_x.reserve(samples.size());
  model.train_y.reserve(samples.size());
  for (const LabeledSample& s : samples) {
    model.train_x.push_back(s.x);
    model.train_y.push_back(s.y);
  }
  const KernelMatrix raw = build_kernel_matrix(model.train_x, config, policy);
  const KernelMatrix kernel = transform_bias(raw);
  DualSolution solution = solve_dual(kernel, model.train_y, lambda, options);
  model.alphas = std::move(solution.alphas);
  model.solver_sweeps = solution.sweeps;
  model.solver_residual = solution.residual;
  refresh_model_cache(model);
  return model;
}

double decision_value(std::uint64_t x, const SvmModel& model) {
  if (model.train_starts.size() != model.train_x.size())
    throw std::logic_error("decision_value: stale model cache, call refresh_model_cache");
  const ExponentInterval fx = interval_of(x, model.config);
  double h = 0.0;
  for (std::size_t i = 0; i < model.train_x.size(); ++i) {
    double q = kernel_from_starts(fx.start, model.train_starts[i], model.config);
    if (!model.policy.is_exact()) {
      Rng rng(stream_seed({model.policy.seed, 0x70726564ull, x,
                           static_cast<std::uint64_t>(i)}));
      q = estimate_entry(q, model.policy, rng);
    }
    h += model.alphas[i] * static_cast<double>(model.train_y[i]) * 0.5 * (q + 1.0);
  }
  return h;
}

int predict(std::uint64_t x, const SvmModel& model) {
  return decision_value(x, model) >= 0.0 ? +1 : -1;
}

}  // namespace qksvm
