#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qksvm/challenge.hpp"

namespace qksvm {

// Everything an experiment run needs; all randomness derives from the
// declared seeds.
struct ExperimentConfig {
  // Group: explicit (p, g) wins over (bits, group_seed).
  std::optional<std::uint64_t> p;
  std::optional<std::uint64_t> g;
  unsigned bits = 20;
  std::uint64_t group_seed = 1;

  // Feature map: explicit k wins over the t rule k = n - ceil(t log2 n);
  // t itself defaults to c/3 with c = log_n m.
  std::optional<unsigned> k;
  std::optional<double> t;

  std::size_t m = 200;
  std::size_t m_test = 1000;
  double lambda = 0.5;

  // Kernel estimation: exact, or shots (0 = auto = m^4).
  bool use_shots = false;
  std::uint64_t shots = 0;
  std::uint64_t noise_seed = 1;

  std::vector<std::uint64_t> seeds;  // per-run seeds
  unsigned workers = 1;
};

GroupParams resolve_group(const ExperimentConfig& config);

// t = c/3 with c = log_n m, per the default parameterization.
double default_t(std::size_t m, unsigned n);
unsigned derive_k(unsigned n, double t, const GroupParams& params);
unsigned resolve_k(const ExperimentConfig& config, const GroupParams& params);

std::uint64_t resolve_shots(const ExperimentConfig& config);

// Per-run policy; shot noise forks off (noise_seed, run_seed).
NoisePolicy resolve_policy(const ExperimentConfig& config,
                           std::uint64_t run_seed);

// Canonical resolved-config object; its hash stamps every report.
nlohmann::json config_to_json(const ExperimentConfig& config,
                              const GroupParams& params, unsigned k);

std::vector<std::uint64_t> default_seeds(std::size_t count);

// A suite's deliverables: the JSON report plus named CSV side files
// (tables and plot data). All content is deterministic; no timestamps.
struct SuiteOutput {
  nlohmann::json report;
  std::vector<std::pair<std::string, std::string>> files;
};

SuiteOutput run_census_suite(const ExperimentConfig& config);
SuiteOutput run_robustness_suite(const ExperimentConfig& config);
SuiteOutput run_perturbation_suite(const ExperimentConfig& config);
SuiteOutput run_baselines_suite(const ExperimentConfig& config);
SuiteOutput run_challenge_suite(const ExperimentConfig& config);
SuiteOutput run_learnability_suite(const ExperimentConfig& config);

// Dispatch by name: census, robustness, perturbation, baselines, challenge,
// learnability.
SuiteOutput run_suite(const std::string& name, const ExperimentConfig& config);

}  // namespace qksvm
