#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qksvm/challenge.hpp"
#include "qksvm/svm.hpp"

namespace qksvm {

// Residues and keys travel as decimal strings so integer width never
// depends on the JSON parser.
std::string to_decimal(std::uint64_t v);
std::uint64_t parse_decimal(const std::string& s);

nlohmann::json group_to_json(const GroupParams& params);
GroupParams group_from_json(const nlohmann::json& j);

nlohmann::json policy_to_json(const NoisePolicy& policy);
NoisePolicy policy_from_json(const nlohmann::json& j);

nlohmann::json kernel_to_json(const KernelMatrix& kernel);
KernelMatrix kernel_from_json(const nlohmann::json& j);
std::string kernel_to_csv(const KernelMatrix& kernel);

nlohmann::json model_to_json(const SvmModel& model);
SvmModel model_from_json(const nlohmann::json& j);

// Dataset JSON Lines: a header object carrying the group, generation seed
// and (optionally) the target key, then one {"x","y"} object per line.
struct DatasetFile {
  GroupParams params;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> concept_key;
  std::vector<LabeledSample> samples;
};

std::string dataset_to_jsonl(const DatasetFile& dataset);
DatasetFile dataset_from_jsonl(const std::string& text);

// Challenge files. The prover-facing stream is a pure function of
// (group, S, T); the secret file carries the hidden key and seed.
std::string challenge_to_prover_jsonl(const ChallengeDataset& challenge);
// Returns the challenge with hidden_s/seed unset.
ChallengeDataset challenge_from_prover_jsonl(const std::string& text);
std::string challenge_secret_to_json(const ChallengeDataset& challenge);
void challenge_apply_secret(ChallengeDataset& challenge, const std::string& text);

std::string answers_to_json(const std::vector<int>& labels);
std::vector<int> answers_from_json(const std::string& text);

// Whole-file helpers.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

// FNV-1a over a canonical string; stamps every emitted report.
std::uint64_t fnv1a(const std::string& text);
std::string hash_hex(std::uint64_t h);

}  // namespace qksvm
