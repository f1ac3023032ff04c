#include "qksvm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qksvm {

namespace {

double margin_from_overlap_count(std::uint64_t count, int y,
                                 const FeatureConfig& config) {
  const double ratio = static_cast<double>(count) /
                       static_cast<double>(config.interval_length());
  return static_cast<double>(y) * (2.0 * ratio * ratio - 1.0);
}

}  // namespace

double ground_truth_margin_from_exponent(std::uint64_t e, const Concept& target,
                                         const FeatureConfig& config) {
  const std::uint64_t count = halfspace_overlap_count(e, target, config);
  return margin_from_overlap_count(count, label_from_exponent(e, target), config);
}

double ground_truth_margin(std::uint64_t x, int y, const Concept& target,
                           const FeatureConfig& config) {
  if (x < 1 || x > target.params.p - 1)
    throw std::domain_error("ground_truth_margin: x outside [1, p-1]");
  const std::uint64_t e = discrete_log(x, target.params);
  if (y != label_from_exponent(e, target))
    throw std::domain_error("ground_truth_margin: y does not match the target");
  const std::uint64_t count = halfspace_overlap_count(e, target, config);
  return margin_from_overlap_count(count, y, config);
}

double ground_truth_norm_squared(const FeatureConfig& config) {
  const double delta = config.delta_exact();
  return (8.0 + 2.0 * delta * delta) / (delta * delta);
}

double ground_truth_norm_squared_brute(const Concept& target,
                                       const FeatureConfig& config) {
  const GroupParams& params = target.params;
  if (params.p > (std::uint64_t{1} << 10))
    throw std::domain_error("ground_truth_norm_squared_brute: p above guard");
  // Halfspace amplitude vector, materialized over the residues g^{s+i}.
  const std::uint64_t half = params.order / 2;
  std::vector<double> amp(params.p, 0.0);
  const double a = 1.0 / std::sqrt(static_cast<double>(half));
  std::uint64_t r = pow_mod(params.g, target.key, params.p);
  for (std::uint64_t i = 0; i < half; ++i) {
    amp[r] = a;
    r = mul_mod(r, params.g, params.p);
  }
  // ||w_s||^2 in the Pauli representation is Tr[rho^2] = (sum amp^2)^2.
  double norm = 0.0;
  for (std::uint64_t z = 1; z < params.p; ++z) norm += amp[z] * amp[z];
  const double hs_norm_sq = norm * norm;
  const double delta = config.delta_exact();
  const double scale_sq = 8.0 / (delta * delta);  // (2 sqrt2 / delta)^2
  return scale_sq * (hs_norm_sq + delta * delta / 4.0);
}

SlackStats ground_truth_slack_stats(std::span<const LabeledSample> dataset,
                                    const Concept& target,
                                    const FeatureConfig& config) {
  SlackStats stats;
  stats.m = dataset.size();
  for (const LabeledSample& s : dataset) {
    const double margin = ground_truth_margin(s.x, s.y, target, config);
    const double xi = std::max(0.0, 1.0 - margin);
    stats.xi_sq_sum += xi * xi;
  }
  stats.bound = 4.0 * static_cast<double>(dataset.size()) * config.delta_nominal();
  return stats;
}

double primal_loss_from_alphas(std::span<const double> alphas,
                               const KernelMatrix& kernel_transformed,
                               std::span<const int> labels, double lambda) {
  if (!kernel_transformed.transformed)
    throw std::domain_error("primal_loss_from_alphas: kernel must be transformed");
  const std::size_t m = kernel_transformed.m;
  if (alphas.size() != m || labels.size() != m)
    throw std::domain_error("primal_loss_from_alphas: size mismatch");
  double quad = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      row += static_cast<double>(labels[i] * labels[j]) *
             kernel_transformed.at(i, j) * alphas[j];
    quad += alphas[i] * row;
  }
  double alpha_sq = 0.0;
  for (const double a : alphas) alpha_sq += a * a;
  return 0.5 * quad + alpha_sq / (2.0 * lambda);
}

double ground_truth_loss(std::span<const LabeledSample> dataset,
                         const Concept& target, const FeatureConfig& config,
                         double lambda) {
  const SlackStats stats = ground_truth_slack_stats(dataset, target, config);
  return 0.5 * ground_truth_norm_squared(config) +
         0.5 * lambda * stats.xi_sq_sum;
}

MarginReport margin_census(const Concept& target, const FeatureConfig& config,
                           bool keep_margins) {
  const GroupParams& params = target.params;
  if (params.p > kExhaustiveLimit)
    throw std::domain_error("margin_census: p above the enumeration guard");
  MarginReport report;
  report.population = params.order;
  report.delta_exact = config.delta_exact();
  const std::uint64_t full = config.interval_length();
  if (keep_margins) report.margins.reserve(params.order);
  for (std::uint64_t e = 0; e < params.order; ++e) {
    const std::uint64_t count = halfspace_overlap_count(e, target, config);
    const int y = label_from_exponent(e, target);
    if (count == full) {
      ++report.count_on_margin_plus;
    } else if (count == 0) {
      ++report.count_zero_minus;
    } else {
      ++report.count_violating;
    }
    if (keep_margins)
      report.margins.push_back(margin_from_overlap_count(count, y, config));
  }
  const auto pop = static_cast<double>(report.population);
  report.fraction_on_margin_plus =
      static_cast<double>(report.count_on_margin_plus) / pop;
  report.fraction_zero_minus =
      static_cast<double>(report.count_zero_minus) / pop;
  report.violating_fraction =
      static_cast<double>(report.count_violating) / pop;
  return report;
}

MarginReport margin_census_sampled(const Concept& target,
                                   const FeatureConfig& config,
                                   std::size_t count, std::uint64_t seed) {
  if (count == 0)
    throw std::domain_error("margin_census_sampled: count must be >= 1");
  MarginReport report;
  report.population = count;
  report.delta_exact = config.delta_exact();
  const std::uint64_t full = config.interval_length();
  Rng rng(stream_seed({0x63656E73ull, seed}));
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t e = rng.next_below(config.params.order);
    const std::uint64_t overlap = halfspace_overlap_count(e, target, config);
    if (overlap == full)
      ++report.count_on_margin_plus;
    else if (overlap == 0)
      ++report.count_zero_minus;
    else
      ++report.count_violating;
  }
  const auto pop = static_cast<double>(count);
  report.fraction_on_margin_plus =
      static_cast<double>(report.count_on_margin_plus) / pop;
  report.fraction_zero_minus =
      static_cast<double>(report.count_zero_minus) / pop;
  report.violating_fraction = static_cast<double>(report.count_violating) / pop;
  return report;
}

PerturbationReport perturbation_check(const KernelMatrix& exact_kernel,
                                      const KernelMatrix& noisy_kernel,
                                      std::span<const int> labels, double lambda,
                                      const SolverOptions& options) {
  if (exact_kernel.m != noisy_kernel.m)
    throw std::domain_error("perturbation_check: size mismatch");
  const std::size_t m = exact_kernel.m;
  PerturbationReport report;
  report.lambda_floor = 1.0 / lambda;
  // ||Q' - Q||_F equals ||K' - K||_F since Q differs by signs only.
  double frob_sq = 0.0;
  for (std::size_t i = 0; i < m * m; ++i) {
    const double d = noisy_kernel.entries[i] - exact_kernel.entries[i];
    frob_sq += d * d;
  }
  report.eps = std::sqrt(frob_sq);
  const DualSolution exact = solve_dual(exact_kernel, labels, lambda, options);
  const DualSolution noisy = solve_dual(noisy_kernel, labels, lambda, options);
  double delta_sq = 0.0;
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double d = noisy.alphas[i] - exact.alphas[i];
    delta_sq += d * d;
    norm_sq += exact.alphas[i] * exact.alphas[i];
  }
  report.alpha_delta = std::sqrt(delta_sq);
  report.alpha_norm = std::sqrt(norm_sq);
  report.applicable = report.eps < report.lambda_floor;
  report.bound = report.applicable
                     ? report.eps / (report.lambda_floor - report.eps) *
                           report.alpha_norm
                     : 0.0;
  return report;
}

double noise_robustness_run(const Concept& target, std::size_t m,
                            std::uint64_t shots, const FeatureConfig& config,
                            double lambda, std::size_t n_test,
                            std::uint64_t seed) {
  Rng data_rng(stream_seed({0x726F62ull, seed}));
  const auto train = generate_dataset(target, m, data_rng);
  // shots == 0 runs the "noisy" arm exactly too (paired-design sanity case).
  const NoisePolicy noisy_policy =
      shots == 0 ? NoisePolicy::exact()
                 : NoisePolicy::with_shots(shots, stream_seed({0x6E6F6973ull, seed}));
  const SvmModel exact_model =
      train_svm(train, config, NoisePolicy::exact(), lambda);
  const SvmModel noisy_model = train_svm(train, config, noisy_policy, lambda);
  double max_dev = 0.0;
  for (std::size_t t = 0; t < n_test; ++t) {
    const std::uint64_t x = 1 + data_rng.next_below(target.params.order);
    const double h = decision_value(x, exact_model);
    const double h_noisy = decision_value(x, noisy_model);
    max_dev = std::max(max_dev, std::fabs(h - h_noisy));
  }
  return max_dev;
}

double alpha_norm_reference(const FeatureConfig& config, std::size_t m) {
  const double delta = config.delta_nominal();
  return 8.0 * (1.0 / (delta * delta) + static_cast<double>(m) * delta);
}

const char* baseline_name(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kRbf: return "rbf";
    case BaselineKind::kLinear: return "linear";
    case BaselineKind::kPoly: return "poly";
  }
  return "?";
}

std::vector<double> binary_encoding(std::uint64_t x, unsigned bits) {
  std::vector<double> v(bits, 0.0);
  double norm_sq = 0.0;
  for (unsigned b = 0; b < bits; ++b) {
    if ((x >> b) & 1) {
      v[b] = 1.0;
      norm_sq += 1.0;
    }
  }
  if (norm_sq > 0.0) {
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (double& c : v) c *= inv;
  }
  return v;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_distance(const std::vector<double>& a,
                        const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double classical_entry(const ClassicalSvm& model, const std::vector<double>& a,
                       const std::vector<double>& b) {
  switch (model.kind) {
    case BaselineKind::kRbf:
      return std::exp(-squared_distance(a, b) / model.sigma_sq);
    case BaselineKind::kLinear:
      return dot(a, b);
    case BaselineKind::kPoly: {
      const double base = 0.5 * (dot(a, b) + 1.0);
      return base * base * base;
    }
  }
  return 0.0;
}

}  // namespace

ClassicalSvm train_classical(BaselineKind kind,
                             std::span<const LabeledSample> train,
                             unsigned bits, double lambda,
                             const SolverOptions& options) {
  if (train.empty()) throw std::domain_error("train_classical: empty training set");
  ClassicalSvm model;
  model.kind = kind;
  model.bits = bits;
  model.lambda = lambda;
  model.train_enc.reserve(train.size());
  model.train_y.reserve(train.size());
  for (const LabeledSample& s : train) {
    model.train_enc.push_back(binary_encoding(s.x, bits));
    model.train_y.push_back(s.y);
  }
  const std::size_t m = train.size();
  if (kind == BaselineKind::kRbf) {
    std::vector<double> d2;
    d2.reserve(m * (m - 1) / 2);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        d2.push_back(squared_distance(model.train_enc[i], model.train_enc[j]));
    if (!d2.empty()) {
      std::nth_element(d2.begin(), d2.begin() + d2.size() / 2, d2.end());
      model.sigma_sq = d2[d2.size() / 2];
      if (model.sigma_sq <= 0.0) model.sigma_sq = 1.0;
    }
  }
  KernelMatrix raw;
  raw.m = m;
  raw.transformed = false;
  raw.entries.assign(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    raw.at(i, i) = 1.0;
    for (std::size_t j = i + 1; j < m; ++j) {
      const double v =
          classical_entry(model, model.train_enc[i], model.train_enc[j]);
      raw.at(i, j) = v;
      raw.at(j, i) = v;
    }
  }
  const KernelMatrix kernel = transform_bias(raw);
  model.alphas = solve_dual(kernel, model.train_y, lambda, options).alphas;
  return model;
}

int classical_predict(const ClassicalSvm& model, std::uint64_t x) {
  const std::vector<double> enc = binary_encoding(x, model.bits);
  double h = 0.0;
  for (std::size_t i = 0; i < model.train_enc.size(); ++i) {
    const double k0 = classical_entry(model, enc, model.train_enc[i]);
    h += model.alphas[i] * static_cast<double>(model.train_y[i]) * 0.5 * (k0 + 1.0);
  }
  return h >= 0.0 ? +1 : -1;
}

double classical_baseline_accuracy(BaselineKind kind,
                                   std::span<const LabeledSample> train,
                                   std::span<const LabeledSample> test,
                                   unsigned bits, double lambda) {
  if (test.empty()) throw std::domain_error("classical_baseline_accuracy: empty test set");
  const ClassicalSvm model = train_classical(kind, train, bits, lambda);
  std::size_t agree = 0;
  for (const LabeledSample& s : test)
    if (classical_predict(model, s.x) == s.y) ++agree;
  return static_cast<double>(agree) / static_cast<double>(test.size());
}

int control_label(std::uint64_t x, const GroupParams& params) {
  return (x >> (params.n - 1)) & 1 ? +1 : -1;
}

std::vector<LabeledSample> make_control_dataset(const GroupParams& params,
                                                std::size_t m, Rng& rng) {
  std::vector<LabeledSample> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::uint64_t x = 1 + rng.next_below(params.order);
    out.push_back(LabeledSample{x, control_label(x, params)});
  }
  return out;
}

}  // namespace qksvm
