#include "qksvm/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qksvm {

using nlohmann::json;

std::string to_decimal(std::uint64_t v) { return std::to_string(v); }

std::uint64_t parse_decimal(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("parse_decimal: not a decimal string: " + s);
  std::size_t pos = 0;
  const std::uint64_t v = std::stoull(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("parse_decimal: trailing junk");
  return v;
}

json group_to_json(const GroupParams& params) {
  return json{{"p", to_decimal(params.p)}, {"g", to_decimal(params.g)}};
}

GroupParams group_from_json(const json& j) {
  return make_group(parse_decimal(j.at("p").get<std::string>()),
                    parse_decimal(j.at("g").get<std::string>()));
}

json policy_to_json(const NoisePolicy& policy) {
  if (policy.is_exact()) return json{{"mode", "exact"}};
  return json{{"mode", "shots"}, {"shots", policy.shots}, {"seed", policy.seed}};
}

NoisePolicy policy_from_json(const json& j) {
  const auto mode = j.at("mode").get<std::string>();
  if (mode == "exact") return NoisePolicy::exact();
  if (mode == "shots")
    return NoisePolicy::with_shots(j.at("shots").get<std::uint64_t>(),
                                   j.at("seed").get<std::uint64_t>());
  throw std::invalid_argument("policy_from_json: unknown mode " + mode);
}

json kernel_to_json(const KernelMatrix& kernel) {
  return json{{"m", kernel.m},
              {"transformed", kernel.transformed},
              {"policy", policy_to_json(kernel.policy)},
              {"entries", kernel.entries}};
}

KernelMatrix kernel_from_json(const json& j) {
  KernelMatrix kernel;
  kernel.m = j.at("m").get<std::size_t>();
  kernel.transformed = j.at("transformed").get<bool>();
  kernel.policy = policy_from_json(j.at("policy"));
  kernel.entries = j.at("entries").get<std::vector<double>>();
  if (kernel.entries.size() != kernel.m * kernel.m)
    throw std::invalid_argument("kernel_from_json: entry count mismatch");
  return kernel;
}

std::string kernel_to_csv(const KernelMatrix& kernel) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < kernel.m; ++i) {
    for (std::size_t j = 0; j < kernel.m; ++j) {
      if (j) out << ',';
      out << kernel.at(i, j);
    }
    out << '\n';
  }
  return out.str();
}

json model_to_json(const SvmModel& model) {
  json train_x = json::array();
  for (const std::uint64_t x : model.train_x) train_x.push_back(to_decimal(x));
  return json{{"format", "qksvm-model/1"},
              {"alphas", model.alphas},
              {"lambda", model.lambda},
              {"train_x", train_x},
              {"train_y", model.train_y},
              {"config", json{{"k", model.config.k},
                              {"group", group_to_json(model.config.params)}}},
              {"policy", policy_to_json(model.policy)},
              {"solver", json{{"sweeps", model.solver_sweeps},
                              {"residual", model.solver_residual}}}};
}

SvmModel model_from_json(const json& j) {
  if (j.at("format").get<std::string>() != "qksvm-model/1")
    throw std::invalid_argument("model_from_json: unknown format");
  SvmModel model;
  model.alphas = j.at("alphas").get<std::vector<double>>();
  model.lambda = j.at("lambda").get<double>();
  for (const auto& x : j.at("train_x"))
    model.train_x.push_back(parse_decimal(x.get<std::string>()));
  model.train_y = j.at("train_y").get<std::vector<int>>();
  const auto& config = j.at("config");
  model.config = make_feature_config(config.at("k").get<unsigned>(),
                                     group_from_json(config.at("group")));
  model.policy = policy_from_json(j.at("policy"));
  model.solver_sweeps = j.at("solver").at("sweeps").get<std::size_t>();
  model.solver_residual = j.at("solver").at("residual").get<double>();
  if (model.alphas.size() != model.train_x.size() ||
      model.train_y.size() != model.train_x.size())
    throw std::invalid_argument("model_from_json: array length mismatch");
  refresh_model_cache(model);
  return model;
}

std::string dataset_to_jsonl(const DatasetFile& dataset) {
  std::ostringstream out;
  json header{{"format", "qksvm-dataset/1"},
              {"group", group_to_json(dataset.params)},
              {"seed", dataset.seed}};
  if (dataset.concept_key) header["concept"] = to_decimal(*dataset.concept_key);
  out << header.dump() << '\n';
  for (const LabeledSample& s : dataset.samples)
    out << json{{"x", to_decimal(s.x)}, {"y", s.y}}.dump() << '\n';
  return out.str();
}

DatasetFile dataset_from_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("dataset_from_jsonl: empty file");
  const json header = json::parse(line);
  if (header.at("format").get<std::string>() != "qksvm-dataset/1")
    throw std::invalid_argument("dataset_from_jsonl: unknown format");
  DatasetFile dataset;
  dataset.params = group_from_json(header.at("group"));
  dataset.seed = header.at("seed").get<std::uint64_t>();
  if (header.contains("concept"))
    dataset.concept_key = parse_decimal(header.at("concept").get<std::string>());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json row = json::parse(line);
    LabeledSample s;
    s.x = parse_decimal(row.at("x").get<std::string>());
    s.y = row.at("y").get<int>();
    if (s.y != 1 && s.y != -1)
      throw std::invalid_argument("dataset_from_jsonl: label must be +-1");
    dataset.samples.push_back(s);
  }
  return dataset;
}

std::string challenge_to_prover_jsonl(const ChallengeDataset& challenge) {
  std::ostringstream out;
  out << json{{"format", "qksvm-challenge/1"},
              {"group", group_to_json(challenge.params)},
              {"m", challenge.S.size()},
              {"m_test", challenge.T.size()}}
             .dump()
      << '\n';
  for (const LabeledSample& s : challenge.S)
    out << json{{"x", to_decimal(s.x)}, {"y", s.y}}.dump() << '\n';
  for (const std::uint64_t t : challenge.T)
    out << json{{"x", to_decimal(t)}}.dump() << '\n';
  return out.str();
}

ChallengeDataset challenge_from_prover_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("challenge_from_prover_jsonl: empty file");
  const json header = json::parse(line);
  if (header.at("format").get<std::string>() != "qksvm-challenge/1")
    throw std::invalid_argument("challenge_from_prover_jsonl: unknown format");
  ChallengeDataset challenge;
  challenge.params = group_from_json(header.at("group"));
  const auto m = header.at("m").get<std::size_t>();
  const auto m_test = header.at("m_test").get<std::size_t>();
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::getline(in, line))
      throw std::invalid_argument("challenge_from_prover_jsonl: truncated S");
    const json row = json::parse(line);
    challenge.S.push_back(LabeledSample{
        parse_decimal(row.at("x").get<std::string>()), row.at("y").get<int>()});
  }
  for (std::size_t i = 0; i < m_test; ++i) {
    if (!std::getline(in, line))
      throw std::invalid_argument("challenge_from_prover_jsonl: truncated T");
    const json row = json::parse(line);
    challenge.T.push_back(parse_decimal(row.at("x").get<std::string>()));
  }
  return challenge;
}

std::string challenge_secret_to_json(const ChallengeDataset& challenge) {
  return json{{"format", "qksvm-challenge-secret/1"},
              {"s", to_decimal(challenge.hidden_s)},
              {"seed", challenge.seed}}
      .dump();
}

void challenge_apply_secret(ChallengeDataset& challenge, const std::string& text) {
  const json j = json::parse(text);
  if (j.at("format").get<std::string>() != "qksvm-challenge-secret/1")
    throw std::invalid_argument("challenge_apply_secret: unknown format");
  challenge.hidden_s = parse_decimal(j.at("s").get<std::string>());
  challenge.seed = j.at("seed").get<std::uint64_t>();
}

std::string answers_to_json(const std::vector<int>& labels) {
  return json(labels).dump();
}

std::vector<int> answers_from_json(const std::string& text) {
  const json j = json::parse(text);
  auto labels = j.get<std::vector<int>>();
  for (const int y : labels)
    if (y != 1 && y != -1)
      throw std::invalid_argument("answers_from_json: labels must be +-1");
  return labels;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

}  // namespace qksvm
