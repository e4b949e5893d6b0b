#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rashomon/checker.hpp"
#include "rashomon/config.hpp"

namespace rashomon {

inline constexpr const char* kToolkitVersion = "0.1.0";

struct StageResult {
  std::string stage;
  std::vector<std::filesystem::path> outputs;
  double seconds = 0.0;
};

struct RunManifest {
  std::uint64_t config_checksum = 0;
  std::string version = kToolkitVersion;
  std::vector<StageResult> stages;
};

// Artifact file names inside the output directory.
namespace artifact {
inline constexpr const char* model = "model.tra";
inline constexpr const char* model_info = "model.json";
inline constexpr const char* expert_policy = "expert.policy";
inline constexpr const char* dataset = "dataset.txt";
inline constexpr const char* synthesis_info = "synthesize.json";
inline constexpr const char* policy_dir = "policies";
inline constexpr const char* training_info = "train.json";
inline constexpr const char* verify_csv = "verify.csv";
inline constexpr const char* verify_info = "verify.json";
inline constexpr const char* attribution_csv = "attribution.csv";
inline constexpr const char* attribution_info = "attribution.json";
inline constexpr const char* rashomon_csv = "rashomon.csv";
inline constexpr const char* rashomon_info = "rashomon.json";
inline constexpr const char* shift_csv = "shift.csv";
inline constexpr const char* shift_sizes_csv = "shift_sizes.csv";
inline constexpr const char* shift_info = "shift.json";
inline constexpr const char* manifest = "manifest.json";
}  // namespace artifact

std::filesystem::path policy_path(const ExperimentConfig& cfg, std::uint64_t seed);

// Text format: "POLICY <n>" followed by one action index per line.
void write_table_policy_file(const TablePolicy& policy, const std::filesystem::path& path);
TablePolicy read_table_policy_file(const std::filesystem::path& path);

// Each stage reads its inputs from cfg.output_dir, writes its outputs there,
// and throws MissingArtifactError when an upstream artifact is absent.
// Progress lines go to `log` when it is non-null.
StageResult cmd_build(const ExperimentConfig& cfg, std::ostream* log = nullptr);
StageResult cmd_synthesize(const ExperimentConfig& cfg, std::ostream* log = nullptr);
StageResult cmd_train(const ExperimentConfig& cfg, std::ostream* log = nullptr);
StageResult cmd_verify(const ExperimentConfig& cfg, std::ostream* log = nullptr);
StageResult cmd_attribute(const ExperimentConfig& cfg, std::ostream* log = nullptr);
StageResult cmd_rashomon(const ExperimentConfig& cfg, std::ostream* log = nullptr);
StageResult cmd_shift(const ExperimentConfig& cfg, std::ostream* log = nullptr);

// Runs every stage in order and writes manifest.json. Verification and
// attribution are recorded as one "verify" stage.
RunManifest cmd_all(const ExperimentConfig& cfg, std::ostream* log = nullptr);

// RFC 4180 field quoting.
std::string csv_field(const std::string& text);
// Probability as printed in CSV reports: at most 6 significant digits.
std::string csv_number(double value);

}  // namespace rashomon
