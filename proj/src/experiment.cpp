#include "qksvm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qksvm/io.hpp"

namespace qksvm {

namespace {

using nlohmann::json;

// Runs fn(0..n-1) on `workers` threads. Work items must be independent;
// outputs land in caller-owned slots so scheduling cannot reorder results.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const unsigned count =
      static_cast<unsigned>(std::min<std::size_t>(workers, n));
  std::vector<std::thread> pool;
  pool.reserve(count);
  for (unsigned w = 0; w < count; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

json report_envelope(const std::string& suite, const ExperimentConfig& config,
                     const GroupParams& params, unsigned k) {
  json resolved = config_to_json(config, params, k);
  return json{{"format", "qksvm-report/1"},
              {"suite", suite},
              {"config", resolved},
              {"config_hash", hash_hex(fnv1a(resolved.dump()))}};
}

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string out;
  for (const auto& c : cells) {
    if (!out.empty()) out += ',';
    out += c;
  }
  out += '\n';
  return out;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

std::string fmt(std::uint64_t v) { return std::to_string(v); }

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

GroupParams resolve_group(const ExperimentConfig& config) {
  if (config.p && config.g) return make_group(*config.p, *config.g);
  if (config.p || config.g)
    throw std::domain_error("config: p and g must be given together");
  return random_group(config.bits, config.group_seed);
}

double default_t(std::size_t m, unsigned n) {
  const double c = std::log(static_cast<double>(m)) /
                   std::log(static_cast<double>(n));
  return c / 3.0;
}

unsigned derive_k(unsigned n, double t, const GroupParams& params) {
  const double shrink = std::ceil(t * std::log2(static_cast<double>(n)));
  long k = static_cast<long>(n) - static_cast<long>(shrink);
  if (k < 1) k = 1;
  // Back off until the feature interval fits strictly inside a halfspace.
  while (k > 1 && (std::uint64_t{2} << k) >= params.order) --k;
  return static_cast<unsigned>(k);
}

unsigned resolve_k(const ExperimentConfig& config, const GroupParams& params) {
  if (config.k) {
    make_feature_config(*config.k, params);  // validates
    return *config.k;
  }
  const double t = config.t ? *config.t : default_t(config.m, params.n);
  return derive_k(params.n, t, params);
}

std::uint64_t resolve_shots(const ExperimentConfig& config) {
  if (config.shots > 0) return config.shots;
  const auto m = static_cast<std::uint64_t>(config.m);
  return m * m * m * m;
}

NoisePolicy resolve_policy(const ExperimentConfig& config,
                           std::uint64_t run_seed) {
  if (!config.use_shots) return NoisePolicy::exact();
  return NoisePolicy::with_shots(resolve_shots(config),
                                 stream_seed({config.noise_seed, run_seed}));
}

json config_to_json(const ExperimentConfig& config, const GroupParams& params,
                    unsigned k) {
  json policy;
  if (config.use_shots)
    policy = json{{"mode", "shots"},
                  {"shots", resolve_shots(config)},
                  {"noise_seed", config.noise_seed}};
  else
    policy = json{{"mode", "exact"}};
  return json{{"group", group_to_json(params)},
              {"k", k},
              {"m", config.m},
              {"m_test", config.m_test},
              {"lambda", config.lambda},
              {"policy", policy},
              {"seeds", config.seeds}};
}

std::vector<std::uint64_t> default_seeds(std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t i = 0; i < count; ++i) seeds[i] = i + 1;
  return seeds;
}

SuiteOutput run_census_suite(const ExperimentConfig& config) {
  const GroupParams params = resolve_group(config);
  const unsigned k = resolve_k(config, params);
  const FeatureConfig feature = make_feature_config(k, params);
  const std::vector<std::uint64_t> seeds =
      config.seeds.empty() ? default_seeds(1) : config.seeds;

  SuiteOutput output;
  output.report = report_envelope("census", config, params, k);
  json rows = json::array();
  std::string csv = csv_line({"seed", "concept", "fraction_on_margin_plus",
                              "fraction_zero_minus", "violating_fraction",
                              "expected_violating", "delta_exact",
                              "delta_nominal"});
  const bool exhaustive = params.p <= kExhaustiveLimit;
  output.report["mode"] = exhaustive ? "exhaustive" : "sampled";
  for (const std::uint64_t seed : seeds) {
    Rng rng(stream_seed({0x63656E73ull, seed}));
    const Concept target = make_concept(rng.next_below(params.order), params);
    const MarginReport report =
        exhaustive ? margin_census(target, feature)
                   : margin_census_sampled(target, feature, config.m_test, seed);
    const double expected =
        2.0 * static_cast<double>(feature.interval_length() - 1) /
        static_cast<double>(params.order);
    rows.push_back(json{{"seed", seed},
                        {"concept", to_decimal(target.key)},
                        {"fraction_on_margin_plus", report.fraction_on_margin_plus},
                        {"fraction_zero_minus", report.fraction_zero_minus},
                        {"violating_fraction", report.violating_fraction},
                        {"expected_violating", expected},
                        {"counts",
                         json{{"on_margin_plus", report.count_on_margin_plus},
                              {"zero_minus", report.count_zero_minus},
                              {"violating", report.count_violating},
                              {"population", report.population}}},
                        {"delta_exact", feature.delta_exact()},
                        {"delta_nominal", feature.delta_nominal()}});
    csv += csv_line({fmt(seed), to_decimal(target.key),
                     fmt(report.fraction_on_margin_plus),
                     fmt(report.fraction_zero_minus),
                     fmt(report.violating_fraction), fmt(expected),
                     fmt(feature.delta_exact()), fmt(feature.delta_nominal())});
  }
  output.report["results"] = json{{"runs", rows}};
  output.files.emplace_back("census.csv", csv);
  return output;
}

SuiteOutput run_robustness_suite(const ExperimentConfig& config) {
  const GroupParams params = resolve_group(config);
  const unsigned k = resolve_k(config, params);
  const FeatureConfig feature = make_feature_config(k, params);
  const std::vector<std::uint64_t> seeds =
      config.seeds.empty() ? default_seeds(100) : config.seeds;
  const auto m = static_cast<std::uint64_t>(config.m);
  const std::vector<std::uint64_t> shot_grid = {m * m, m * m * m, m * m * m * m};

  SuiteOutput output;
  output.report = report_envelope("robustness", config, params, k);
  std::string csv = csv_line({"shots", "seed", "max_deviation"});
  json by_shots = json::array();
  std::string plot = csv_line({"shots", "median_deviation", "max_deviation"});
  for (const std::uint64_t shots : shot_grid) {
    std::vector<double> deviations(seeds.size());
    parallel_for(seeds.size(), config.workers, [&](std::size_t i) {
      Rng rng(stream_seed({0x726F6273ull, seeds[i]}));
      const Concept target = make_concept(rng.next_below(params.order), params);
      deviations[i] = noise_robustness_run(target, config.m, shots, feature,
                                           config.lambda, config.m_test,
                                           seeds[i]);
    });
    for (std::size_t i = 0; i < seeds.size(); ++i)
      csv += csv_line({fmt(shots), fmt(seeds[i]), fmt(deviations[i])});
    const double med = median(deviations);
    const double max_dev =
        *std::max_element(deviations.begin(), deviations.end());
    by_shots.push_back(json{{"shots", shots},
                            {"median_deviation", med},
                            {"max_deviation", max_dev},
                            {"deviations", deviations}});
    plot += csv_line({fmt(shots), fmt(med), fmt(max_dev)});
  }
  output.report["results"] =
      json{{"by_shots", by_shots},
           {"alpha_norm_reference", alpha_norm_reference(feature, config.m)}};
  output.files.emplace_back("robustness.csv", csv);
  output.files.emplace_back("robustness_plot.csv", plot);
  return output;
}

SuiteOutput run_perturbation_suite(const ExperimentConfig& config) {
  const GroupParams params = resolve_group(config);
  const unsigned k = resolve_k(config, params);
  const FeatureConfig feature = make_feature_config(k, params);
  const std::vector<std::uint64_t> seeds =
      config.seeds.empty() ? default_seeds(100) : config.seeds;
  const std::uint64_t shots = resolve_shots(config);

  SuiteOutput output;
  output.report = report_envelope("perturbation", config, params, k);
  std::vector<PerturbationReport> reports(seeds.size());
  std::vector<double> alpha_norm_sq(seeds.size());
  parallel_for(seeds.size(), config.workers, [&](std::size_t i) {
    Rng rng(stream_seed({0x70657274ull, seeds[i]}));
    const Concept target = make_concept(rng.next_below(params.order), params);
    const auto train = generate_dataset(target, config.m, rng);
    std::vector<std::uint64_t> xs;
    std::vector<int> ys;
    for (const auto& s : train) {
      xs.push_back(s.x);
      ys.push_back(s.y);
    }
    const auto exact_kernel =
        transform_bias(build_kernel_matrix(xs, feature, NoisePolicy::exact()));
    const auto noisy_kernel = transform_bias(build_kernel_matrix(
        xs, feature,
        NoisePolicy::with_shots(shots, stream_seed({config.noise_seed, seeds[i]}))));
    reports[i] = perturbation_check(exact_kernel, noisy_kernel, ys, config.lambda);
    alpha_norm_sq[i] = reports[i].alpha_norm * reports[i].alpha_norm;
  });
  std::string csv = csv_line({"seed", "eps", "lambda_floor", "alpha_delta",
                              "bound", "applicable", "held"});
  json rows = json::array();
  std::size_t applicable = 0;
  std::size_t held = 0;
  double alpha_norm_sq_sum = 0.0;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const PerturbationReport& r = reports[i];
    const bool ok = !r.applicable || r.alpha_delta <= r.bound + 2e-8;
    if (r.applicable) {
      ++applicable;
      if (ok) ++held;
    }
    alpha_norm_sq_sum += alpha_norm_sq[i];
    rows.push_back(json{{"seed", seeds[i]},
                        {"eps", r.eps},
                        {"lambda_floor", r.lambda_floor},
                        {"alpha_delta", r.alpha_delta},
                        {"bound", r.bound},
                        {"applicable", r.applicable},
                        {"held", ok}});
    csv += csv_line({fmt(seeds[i]), fmt(r.eps), fmt(r.lambda_floor),
                     fmt(r.alpha_delta), fmt(r.bound),
                     r.applicable ? "1" : "0", ok ? "1" : "0"});
  }
  output.report["results"] =
      json{{"runs", rows},
           {"applicable", applicable},
           {"held", held},
           {"mean_alpha_norm_sq", alpha_norm_sq_sum / static_cast<double>(seeds.size())},
           {"alpha_norm_reference", alpha_norm_reference(feature, config.m)}};
  output.files.emplace_back("perturbation.csv", csv);
  return output;
}

SuiteOutput run_baselines_suite(const ExperimentConfig& config) {
  const GroupParams params = resolve_group(config);
  const unsigned k = resolve_k(config, params);
  const std::vector<std::uint64_t> seeds =
      config.seeds.empty() ? default_seeds(30) : config.seeds;
  const BaselineKind kinds[] = {BaselineKind::kRbf, BaselineKind::kLinear};

  SuiteOutput output;
  output.report = report_envelope("baselines", config, params, k);
  std::string csv =
      csv_line({"kind", "seed", "dlp_accuracy", "control_accuracy"});
  json rows = json::array();
  for (const BaselineKind kind : kinds) {
    std::vector<double> dlp_acc(seeds.size());
    std::vector<double> control_acc(seeds.size());
    parallel_for(seeds.size(), config.workers, [&](std::size_t i) {
      Rng rng(stream_seed({0x62617365ull, seeds[i]}));
      const Concept target = make_concept(rng.next_below(params.order), params);
      const auto train = generate_dataset(target, config.m, rng);
      const auto test = generate_dataset(target, config.m_test, rng);
      dlp_acc[i] = classical_baseline_accuracy(kind, train, test, params.n,
                                               config.lambda);
      const auto control_train = make_control_dataset(params, config.m, rng);
      const auto control_test = make_control_dataset(params, config.m_test, rng);
      control_acc[i] = classical_baseline_accuracy(kind, control_train,
                                                   control_test, params.n,
                                                   config.lambda);
    });
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      rows.push_back(json{{"kind", baseline_name(kind)},
                          {"seed", seeds[i]},
                          {"dlp_accuracy", dlp_acc[i]},
                          {"control_accuracy", control_acc[i]}});
      csv += csv_line({baseline_name(kind), fmt(seeds[i]), fmt(dlp_acc[i]),
                       fmt(control_acc[i])});
    }
  }
  output.report["results"] = json{{"runs", rows}};
  output.files.emplace_back("baselines.csv", csv);
  return output;
}

SuiteOutput run_learnability_suite(const ExperimentConfig& config) {
  const GroupParams params = resolve_group(config);
  const std::vector<std::uint64_t> seeds =
      config.seeds.empty() ? default_seeds(30) : config.seeds;
  // Accuracy-vs-m curve: doubling grid up to the configured m.
  std::vector<std::size_t> m_grid;
  for (std::size_t m = std::max<std::size_t>(config.m / 8, 2); m < config.m; m *= 2)
    m_grid.push_back(m);
  m_grid.push_back(config.m);
  const unsigned k_report = resolve_k(config, params);

  SuiteOutput output;
  output.report = report_envelope("learnability", config, params, k_report);
  std::string csv = csv_line({"m", "k", "seed", "accuracy"});
  std::string plot = csv_line({"m", "median_accuracy", "min_accuracy"});
  json by_m = json::array();
  for (const std::size_t m : m_grid) {
    // k follows the t rule at each m unless pinned explicitly.
    ExperimentConfig sized = config;
    sized.m = m;
    const unsigned k = resolve_k(sized, params);
    const FeatureConfig feature = make_feature_config(k, params);
    std::vector<double> accs(seeds.size());
    parallel_for(seeds.size(), config.workers, [&](std::size_t i) {
      Rng rng(stream_seed({0x6C726Eull, seeds[i], static_cast<std::uint64_t>(m)}));
      const Concept target = make_concept(rng.next_below(params.order), params);
      const auto train = generate_dataset(target, m, rng);
      const SvmModel model = train_svm(train, feature,
                                       resolve_policy(config, seeds[i]),
                                       config.lambda);
      std::size_t agree = 0;
      for (std::size_t t = 0; t < config.m_test; ++t) {
        const LabeledSample s = generate_sample(target, rng);
        agree += predict(s.x, model) == s.y;
      }
      accs[i] = static_cast<double>(agree) / static_cast<double>(config.m_test);
    });
    for (std::size_t i = 0; i < seeds.size(); ++i)
      csv += csv_line({fmt(static_cast<std::uint64_t>(m)), fmt(static_cast<std::uint64_t>(k)),
                       fmt(seeds[i]), fmt(accs[i])});
    const double med = median(accs);
    const double min_acc = *std::min_element(accs.begin(), accs.end());
    by_m.push_back(json{{"m", m},
                        {"k", k},
                        {"median_accuracy", med},
                        {"min_accuracy", min_acc},
                        {"accuracies", accs}});
    plot += csv_line({fmt(static_cast<std::uint64_t>(m)), fmt(med), fmt(min_acc)});
  }
  output.report["results"] = json{{"by_m", by_m}};
  output.files.emplace_back("learnability.csv", csv);
  output.files.emplace_back("learnability_plot.csv", plot);
  return output;
}

SuiteOutput run_challenge_suite(const ExperimentConfig& config) {
  const GroupParams params = resolve_group(config);
  const unsigned k = resolve_k(config, params);
  const FeatureConfig feature = make_feature_config(k, params);
  const std::vector<std::uint64_t> seeds =
      config.seeds.empty() ? default_seeds(30) : config.seeds;

  SuiteOutput output;
  output.report = report_envelope("challenge", config, params, k);
  struct Row {
    double svm_acc = 0, dlog_acc = 0, classical_acc = 0;
    bool svm_accepted = false, dlog_accepted = false, classical_accepted = false;
  };
  std::vector<Row> rows(seeds.size());
  parallel_for(seeds.size(), config.workers, [&](std::size_t i) {
    const ChallengeDataset challenge =
        make_challenge(params, config.m, config.m_test, seeds[i]);
    const NoisePolicy policy = resolve_policy(config, seeds[i]);
    const auto svm_labels =
        prover_svmqke(challenge.S, challenge.T, feature, policy, config.lambda);
    const auto dlog_labels = prover_dlog(challenge.S, challenge.T, params);
    const auto classical_labels = prover_classical(
        BaselineKind::kRbf, challenge.S, challenge.T, params, config.lambda);
    const VerifyResult svm = verify(svm_labels, challenge);
    const VerifyResult dlog = verify(dlog_labels, challenge);
    const VerifyResult classical = verify(classical_labels, challenge);
    rows[i] = Row{svm.accuracy,       dlog.accuracy,      classical.accuracy,
                  svm.accepted,       dlog.accepted,      classical.accepted};
  });
  std::string csv =
      csv_line({"seed", "svmqke_accuracy", "svmqke_accepted", "dlog_accuracy",
                "dlog_accepted", "classical_accuracy", "classical_accepted"});
  json runs = json::array();
  std::size_t svm_accepts = 0, dlog_accepts = 0, classical_rejects = 0;
  std::vector<double> dlog_accs;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const Row& r = rows[i];
    svm_accepts += r.svm_accepted;
    dlog_accepts += r.dlog_accepted;
    classical_rejects += !r.classical_accepted;
    dlog_accs.push_back(r.dlog_acc);
    runs.push_back(json{{"seed", seeds[i]},
                        {"svmqke_accuracy", r.svm_acc},
                        {"svmqke_accepted", r.svm_accepted},
                        {"dlog_accuracy", r.dlog_acc},
                        {"dlog_accepted", r.dlog_accepted},
                        {"classical_accuracy", r.classical_acc},
                        {"classical_accepted", r.classical_accepted}});
    csv += csv_line({fmt(seeds[i]), fmt(r.svm_acc), r.svm_accepted ? "1" : "0",
                     fmt(r.dlog_acc), r.dlog_accepted ? "1" : "0",
                     fmt(r.classical_acc), r.classical_accepted ? "1" : "0"});
  }
  output.report["results"] = json{{"runs", runs},
                                  {"svmqke_accepts", svm_accepts},
                                  {"dlog_accepts", dlog_accepts},
                                  {"classical_rejects", classical_rejects},
                                  {"dlog_median_accuracy", median(dlog_accs)}};
  output.files.emplace_back("challenge.csv", csv);
  return output;
}

SuiteOutput run_suite(const std::string& name, const ExperimentConfig& config) {
  if (name == "census") return run_census_suite(config);
  if (name == "learnability") return run_learnability_suite(config);
  if (name == "robustness") return run_robustness_suite(config);
  if (name == "perturbation") return run_perturbation_suite(config);
  if (name == "baselines") return run_baselines_suite(config);
  if (name == "challenge") return run_challenge_suite(config);
  throw std::domain_error("unknown experiment suite: " + name);
}

}  // namespace qksvm
