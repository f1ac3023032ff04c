// Command-line front end: dataset generation, training, evaluation,
// experiment suites and the verifier/prover challenge protocol.
//
// Exit codes: 0 success, 2 usage or invalid input, 3 solver failure,
// 4 challenge verification reject.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qksvm/experiment.hpp"
#include "qksvm/io.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct GroupOptions {
  std::optional<std::uint64_t> p;
  std::optional<std::uint64_t> g;
  unsigned bits = 20;
  std::uint64_t group_seed = 1;
};

void add_group_options(CLI::App* cmd, GroupOptions& opts) {
  cmd->add_option("--p", opts.p, "Explicit prime modulus");
  cmd->add_option("--g", opts.g, "Explicit generator (requires --p)");
  cmd->add_option("--bits", opts.bits, "Random group bit length")
      ->default_val(20);
  cmd->add_option("--group-seed", opts.group_seed, "Random group seed")
      ->default_val(1);
}

qksvm::GroupParams resolve_group(const GroupOptions& opts) {
  if (opts.p && opts.g) return qksvm::make_group(*opts.p, *opts.g);
  if (opts.p || opts.g)
    throw std::domain_error("--p and --g must be given together");
  return qksvm::random_group(opts.bits, opts.group_seed);
}

struct FeatureOptions {
  std::optional<unsigned> k;
  std::optional<double> t;
};

void add_feature_options(CLI::App* cmd, FeatureOptions& opts) {
  cmd->add_option("--k", opts.k, "Feature interval exponent (2^k residues)");
  cmd->add_option("--t", opts.t, "Margin exponent: k = n - ceil(t log2 n)");
}

unsigned resolve_k(const FeatureOptions& opts, const qksvm::GroupParams& params,
                   std::size_t m) {
  if (opts.k) {
    qksvm::make_feature_config(*opts.k, params);
    return *opts.k;
  }
  const double t = opts.t ? *opts.t : qksvm::default_t(m, params.n);
  return qksvm::derive_k(params.n, t, params);
}

struct PolicyOptions {
  std::string mode = "exact";
  std::uint64_t shots = 0;  // 0 = auto (m^4)
  std::uint64_t noise_seed = 1;
};

void add_policy_options(CLI::App* cmd, PolicyOptions& opts) {
  cmd->add_option("--policy", opts.mode, "Kernel estimation: exact | shots")
      ->check(CLI::IsMember({"exact", "shots"}))
      ->default_val("exact");
  cmd->add_option("--shots", opts.shots, "Shot count (0 = auto = m^4)")
      ->default_val(0);
  cmd->add_option("--noise-seed", opts.noise_seed, "Shot-noise seed")
      ->default_val(1);
}

qksvm::NoisePolicy resolve_policy(const PolicyOptions& opts, std::size_t m) {
  if (opts.mode == "exact") return qksvm::NoisePolicy::exact();
  std::uint64_t shots = opts.shots;
  if (shots == 0) {
    const auto mm = static_cast<std::uint64_t>(m);
    shots = mm * mm * mm * mm;
  }
  return qksvm::NoisePolicy::with_shots(shots, opts.noise_seed);
}

int cmd_gen(const GroupOptions& group_opts, const FeatureOptions& feature_opts,
            std::optional<std::uint64_t> concept_key, std::size_t m,
            std::uint64_t seed, const std::string& out) {
  const qksvm::GroupParams params = resolve_group(group_opts);
  if (feature_opts.k || feature_opts.t)
    resolve_k(feature_opts, params, m);  // invariant guard only
  std::uint64_t key;
  if (concept_key) {
    key = *concept_key;
  } else {
    qksvm::Rng rng(qksvm::stream_seed({0x636F6E63ull, seed}));
    key = rng.next_below(params.order);
  }
  const qksvm::Concept target = qksvm::make_concept(key, params);
  qksvm::Rng rng(qksvm::stream_seed({0x64617461ull, seed}));
  qksvm::DatasetFile dataset;
  dataset.params = params;
  dataset.seed = seed;
  dataset.concept_key = key;
  dataset.samples = qksvm::generate_dataset(target, m, rng);
  qksvm::write_text_file(out, qksvm::dataset_to_jsonl(dataset));
  std::cout << "wrote " << m << " samples to " << out << " (p=" << params.p
            << ", g=" << params.g << ")\n";
  return 0;
}

int cmd_train(const std::string& data_path, const FeatureOptions& feature_opts,
              const PolicyOptions& policy_opts, double lambda,
              const std::string& out, const std::string& dump_kernel) {
  const qksvm::DatasetFile dataset =
      qksvm::dataset_from_jsonl(qksvm::read_text_file(data_path));
  if (dataset.samples.empty())
    throw std::domain_error("train: dataset has no samples");
  const unsigned k =
      resolve_k(feature_opts, dataset.params, dataset.samples.size());
  const qksvm::FeatureConfig config =
      qksvm::make_feature_config(k, dataset.params);
  const qksvm::NoisePolicy policy =
      resolve_policy(policy_opts, dataset.samples.size());
  if (!dump_kernel.empty()) {
    std::vector<std::uint64_t> xs;
    for (const auto& s : dataset.samples) xs.push_back(s.x);
    const qksvm::KernelMatrix raw =
        qksvm::build_kernel_matrix(xs, config, policy);
    qksvm::write_text_file(dump_kernel + ".json",
                           qksvm::kernel_to_json(raw).dump() + "\n");
    qksvm::write_text_file(dump_kernel + ".csv", qksvm::kernel_to_csv(raw));
  }
  const qksvm::SvmModel model =
      qksvm::train_svm(dataset.samples, config, policy, lambda);
  qksvm::write_text_file(out, qksvm::model_to_json(model).dump(2) + "\n");
  std::cout << "trained m=" << dataset.samples.size() << " k=" << k
            << " sweeps=" << model.solver_sweeps
            << " residual=" << model.solver_residual << " -> " << out << "\n";
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_path,
             bool exhaustive, std::optional<std::uint64_t> concept_key,
             const std::string& out) {
  const std::string model_text = qksvm::read_text_file(model_path);
  const qksvm::SvmModel model =
      qksvm::model_from_json(json::parse(model_text));
  json report{{"format", "qksvm-eval/1"},
              {"model_hash", qksvm::hash_hex(qksvm::fnv1a(model_text))}};
  if (exhaustive) {
    if (!concept_key)
      throw std::domain_error("eval: --exhaustive requires --concept");
    const qksvm::Concept target =
        qksvm::make_concept(*concept_key, model.config.params);
    const double acc = qksvm::exact_accuracy(
        [&](std::uint64_t x) { return qksvm::predict(x, model); }, target);
    report["accuracy"] = acc;
    report["mode"] = "exhaustive";
    report["population"] = model.config.params.order;
  } else {
    if (data_path.empty())
      throw std::domain_error("eval: need --data or --exhaustive");
    const qksvm::DatasetFile dataset =
        qksvm::dataset_from_jsonl(qksvm::read_text_file(data_path));
    if (dataset.samples.empty())
      throw std::domain_error("eval: dataset has no samples");
    if (dataset.params.p != model.config.params.p ||
        dataset.params.g != model.config.params.g)
      throw std::domain_error("eval: model and dataset use different groups");
    std::size_t correct = 0;
    for (const qksvm::LabeledSample& s : dataset.samples)
      if (qksvm::predict(s.x, model) == s.y) ++correct;
    report["accuracy"] = static_cast<double>(correct) /
                         static_cast<double>(dataset.samples.size());
    report["mode"] = "testset";
    report["count"] = dataset.samples.size();
    report["correct"] = correct;
    report["data_seed"] = dataset.seed;
  }
  const std::string text = report.dump(2) + "\n";
  if (out.empty())
    std::cout << text;
  else {
    qksvm::write_text_file(out, text);
    std::cout << "accuracy " << report["accuracy"].get<double>() << " -> "
              << out << "\n";
  }
  return 0;
}

int cmd_experiment(const std::string& suite, qksvm::ExperimentConfig config,
                   std::size_t num_seeds, std::uint64_t seed_base,
                   const std::string& out_dir) {
  if (config.seeds.empty()) {
    std::vector<std::uint64_t> seeds(num_seeds);
    for (std::size_t i = 0; i < num_seeds; ++i) seeds[i] = seed_base + i;
    config.seeds = std::move(seeds);
  }
  const qksvm::SuiteOutput output = qksvm::run_suite(suite, config);
  fs::create_directories(out_dir);
  const fs::path report_path = fs::path(out_dir) / (suite + ".json");
  qksvm::write_text_file(report_path, output.report.dump(2) + "\n");
  for (const auto& [name, content] : output.files)
    qksvm::write_text_file(fs::path(out_dir) / name, content);
  std::cout << "suite " << suite << " -> " << report_path.string() << " (+"
            << output.files.size() << " csv)\n";
  return 0;
}

int cmd_challenge_make(const GroupOptions& group_opts, std::size_t m,
                       std::size_t m_test, std::uint64_t seed,
                       const std::string& prefix) {
  const qksvm::GroupParams params = resolve_group(group_opts);
  const qksvm::ChallengeDataset challenge =
      qksvm::make_challenge(params, m, m_test, seed);
  qksvm::write_text_file(prefix + ".challenge.jsonl",
                         qksvm::challenge_to_prover_jsonl(challenge));
  qksvm::write_text_file(prefix + ".secret.json",
                         qksvm::challenge_secret_to_json(challenge) + "\n");
  std::cout << "challenge -> " << prefix << ".challenge.jsonl"
            << " (secret: " << prefix << ".secret.json)\n";
  return 0;
}

int cmd_challenge_respond(const std::string& challenge_path,
                          const std::string& prover,
                          const FeatureOptions& feature_opts,
                          const PolicyOptions& policy_opts, double lambda,
                          const std::string& out) {
  const qksvm::ChallengeDataset challenge = qksvm::challenge_from_prover_jsonl(
      qksvm::read_text_file(challenge_path));
  std::vector<int> labels;
  if (prover == "svmqke") {
    const unsigned k =
        resolve_k(feature_opts, challenge.params, challenge.S.size());
    const qksvm::FeatureConfig config =
        qksvm::make_feature_config(k, challenge.params);
    const qksvm::NoisePolicy policy =
        resolve_policy(policy_opts, challenge.S.size());
    labels = qksvm::prover_svmqke(challenge.S, challenge.T, config, policy,
                                  lambda);
  } else if (prover == "dlog") {
    labels = qksvm::prover_dlog(challenge.S, challenge.T, challenge.params);
  } else if (prover == "rbf" || prover == "linear") {
    const qksvm::BaselineKind kind = prover == "rbf"
                                         ? qksvm::BaselineKind::kRbf
                                         : qksvm::BaselineKind::kLinear;
    labels = qksvm::prover_classical(kind, challenge.S, challenge.T,
                                     challenge.params, lambda);
  } else {
    throw std::domain_error("unknown prover: " + prover);
  }
  qksvm::write_text_file(out, qksvm::answers_to_json(labels) + "\n");
  std::cout << "prover " << prover << " answered " << labels.size()
            << " points -> " << out << "\n";
  return 0;
}

int cmd_challenge_verify(const std::string& challenge_path,
                         const std::string& secret_path,
                         const std::string& answers_path,
                         const std::string& out) {
  qksvm::ChallengeDataset challenge = qksvm::challenge_from_prover_jsonl(
      qksvm::read_text_file(challenge_path));
  qksvm::challenge_apply_secret(challenge,
                                qksvm::read_text_file(secret_path));
  const std::vector<int> labels =
      qksvm::answers_from_json(qksvm::read_text_file(answers_path));
  const qksvm::VerifyResult result = qksvm::verify(labels, challenge);
  const json report{{"format", "qksvm-verify/1"},
                    {"accuracy", result.accuracy},
                    {"accepted", result.accepted},
                    {"m_test", challenge.T.size()},
                    {"seed", challenge.seed}};
  const std::string text = report.dump(2) + "\n";
  if (!out.empty()) qksvm::write_text_file(out, text);
  std::cout << (result.accepted ? "ACCEPT" : "REJECT") << " accuracy "
            << result.accuracy << "\n";
  return result.accepted ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interval-kernel SVM learning pipeline over Z_p^*"};
  app.require_subcommand(1);

  int rc = 0;

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a labeled dataset");
  GroupOptions gen_group;
  FeatureOptions gen_feature;
  add_group_options(gen, gen_group);
  add_feature_options(gen, gen_feature);
  std::optional<std::uint64_t> gen_concept;
  std::size_t gen_m = 200;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--concept", gen_concept, "Concept key (default: from seed)");
  gen->add_option("--m", gen_m, "Sample count")->default_val(200);
  gen->add_option("--seed", gen_seed, "Generation seed")->default_val(1);
  gen->add_option("--out", gen_out, "Output JSONL path")->required();
  gen->callback([&] {
    rc = cmd_gen(gen_group, gen_feature, gen_concept, gen_m, gen_seed, gen_out);
  });

  // train
  auto* train = app.add_subcommand("train", "Train the kernel SVM");
  FeatureOptions train_feature;
  PolicyOptions train_policy;
  std::string train_data, train_out, train_dump_kernel;
  double train_lambda = 0.5;
  train->add_option("--data", train_data, "Training dataset JSONL")->required();
  add_feature_options(train, train_feature);
  add_policy_options(train, train_policy);
  train->add_option("--lambda", train_lambda, "Regularization constant")
      ->default_val(0.5);
  train->add_option("--out", train_out, "Output model JSON path")->required();
  train->add_option("--dump-kernel", train_dump_kernel,
                    "Also write the raw Gram matrix to <prefix>.json/.csv");
  train->callback([&] {
    rc = cmd_train(train_data, train_feature, train_policy, train_lambda,
                   train_out, train_dump_kernel);
  });

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate a trained model");
  std::string eval_model, eval_data, eval_out;
  bool eval_exhaustive = false;
  std::optional<std::uint64_t> eval_concept;
  eval->add_option("--model", eval_model, "Model JSON path")->required();
  eval->add_option("--data", eval_data, "Labeled test dataset JSONL");
  eval->add_flag("--exhaustive", eval_exhaustive,
                 "Score against the full group (needs --concept)");
  eval->add_option("--concept", eval_concept, "Concept key for --exhaustive");
  eval->add_option("--out", eval_out, "Report path (default: stdout)");
  eval->callback([&] {
    rc = cmd_eval(eval_model, eval_data, eval_exhaustive, eval_concept,
                  eval_out);
  });

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run a diagnostics suite");
  std::string exp_suite, exp_out_dir = "reports";
  qksvm::ExperimentConfig exp_config;
  GroupOptions exp_group;
  FeatureOptions exp_feature;
  PolicyOptions exp_policy;
  std::size_t exp_num_seeds = 0;
  std::uint64_t exp_seed_base = 1;
  experiment
      ->add_option("--suite", exp_suite,
                   "census | robustness | perturbation | baselines | challenge | learnability")
      ->required();
  add_group_options(experiment, exp_group);
  add_feature_options(experiment, exp_feature);
  add_policy_options(experiment, exp_policy);
  experiment->add_option("--m", exp_config.m, "Training set size")
      ->default_val(200);
  experiment->add_option("--m-test", exp_config.m_test, "Test set size")
      ->default_val(1000);
  experiment->add_option("--lambda", exp_config.lambda, "Regularization")
      ->default_val(0.5);
  experiment->add_option("--seeds", exp_config.seeds,
                         "Explicit per-run seeds (comma separated)")
      ->delimiter(',');
  experiment->add_option("--num-seeds", exp_num_seeds,
                         "Number of consecutive seeds (suite default if 0)");
  experiment->add_option("--seed-base", exp_seed_base,
                         "First seed when --num-seeds is used")
      ->default_val(1);
  experiment->add_option("--workers", exp_config.workers, "Worker threads")
      ->default_val(1);
  experiment->add_option("--out-dir", exp_out_dir, "Report directory")
      ->default_val("reports");
  experiment->callback([&] {
    exp_config.p = exp_group.p;
    exp_config.g = exp_group.g;
    exp_config.bits = exp_group.bits;
    exp_config.group_seed = exp_group.group_seed;
    exp_config.k = exp_feature.k;
    exp_config.t = exp_feature.t;
    exp_config.use_shots = exp_policy.mode == "shots";
    exp_config.shots = exp_policy.shots;
    exp_config.noise_seed = exp_policy.noise_seed;
    if (exp_config.seeds.empty() && exp_num_seeds == 0) {
      // Suite defaults apply inside run_suite.
    }
    rc = cmd_experiment(exp_suite, exp_config,
                        exp_num_seeds == 0 ? 0 : exp_num_seeds, exp_seed_base,
                        exp_out_dir);
  });

  // challenge
  auto* challenge = app.add_subcommand("challenge", "Verifier/prover protocol");
  challenge->require_subcommand(1);

  auto* make = challenge->add_subcommand("make", "Create a challenge");
  GroupOptions make_group_opts;
  add_group_options(make, make_group_opts);
  std::size_t make_m = 200, make_m_test = 1000;
  std::uint64_t make_seed = 1;
  std::string make_prefix;
  make->add_option("--m", make_m, "Labeled training samples")->default_val(200);
  make->add_option("--m-test", make_m_test, "Unlabeled test points")
      ->default_val(1000);
  make->add_option("--seed", make_seed, "Challenge seed")->default_val(1);
  make->add_option("--out-prefix", make_prefix, "Output file prefix")
      ->required();
  make->callback([&] {
    rc = cmd_challenge_make(make_group_opts, make_m, make_m_test, make_seed,
                            make_prefix);
  });

  auto* respond = challenge->add_subcommand("respond", "Label a challenge");
  std::string respond_challenge, respond_prover = "svmqke", respond_out;
  FeatureOptions respond_feature;
  PolicyOptions respond_policy;
  double respond_lambda = 0.5;
  respond->add_option("--challenge", respond_challenge, "Prover-facing file")
      ->required();
  respond
      ->add_option("--prover", respond_prover, "svmqke | dlog | rbf | linear")
      ->check(CLI::IsMember({"svmqke", "dlog", "rbf", "linear"}))
      ->default_val("svmqke");
  add_feature_options(respond, respond_feature);
  add_policy_options(respond, respond_policy);
  respond->add_option("--lambda", respond_lambda, "Regularization")
      ->default_val(0.5);
  respond->add_option("--out", respond_out, "Answers JSON path")->required();
  respond->callback([&] {
    rc = cmd_challenge_respond(respond_challenge, respond_prover,
                               respond_feature, respond_policy, respond_lambda,
                               respond_out);
  });

  auto* verify = challenge->add_subcommand("verify", "Score prover answers");
  std::string verify_challenge, verify_secret, verify_answers, verify_out;
  verify->add_option("--challenge", verify_challenge, "Prover-facing file")
      ->required();
  verify->add_option("--secret", verify_secret, "Verifier secret file")
      ->required();
  verify->add_option("--answers", verify_answers, "Prover answers file")
      ->required();
  verify->add_option("--out", verify_out, "Report path");
  verify->callback([&] {
    rc = cmd_challenge_verify(verify_challenge, verify_secret, verify_answers,
                              verify_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const qksvm::SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
