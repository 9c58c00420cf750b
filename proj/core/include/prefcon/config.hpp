#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "prefcon/oracle.hpp"

namespace prefcon {

enum class Experiment {
  kLabelBias,
  kFormatSensitivity,
  kAsymmetryTransitivity,
  kIia,
  kReversibility,
};

std::string_view to_string(Experiment e);
Experiment parse_experiment(std::string_view name);

/// Everything that determines a run. JSON field names match the member
/// names; relative paths resolve against the configuration file's directory.
struct ExperimentConfig {
  Experiment experiment = Experiment::kAsymmetryTransitivity;
  std::filesystem::path test_path;
  std::filesystem::path dev_path;
  std::size_t cap = 20;
  std::size_t few_shot_k = 5;
  std::string labels = "alphabetic";
  OracleDescriptor oracle;
  std::string template_name = "default";
  int template_version = 1;
  /// Optional template file registered before lookup.
  std::filesystem::path template_path;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  /// Defaults to `<output_dir>/cache`.
  std::filesystem::path cache_dir;
  std::size_t concurrency = 4;
  std::size_t max_retries = 3;
  std::chrono::milliseconds retry_initial_delay{500};
  DecodeParams decode;
  std::size_t option_count = 4;

  /// Unknown fields are rejected. An oracle without an explicit seed
  /// inherits `seed`.
  static ExperimentConfig from_json(const nlohmann::json& j,
                                    const std::filesystem::path& base_dir = {});
  static ExperimentConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  /// Throws std::invalid_argument on out-of-range values or missing files.
  void validate() const;

  std::filesystem::path effective_cache_dir() const;
  /// Digest over the fields that determine results (not output locations
  /// or concurrency); names the record store and reports.
  std::string run_digest() const;
};

/// Whether an oracle spec (string or object) fixes its own seed.
bool oracle_spec_has_seed(const nlohmann::json& spec);

}  // namespace prefcon
