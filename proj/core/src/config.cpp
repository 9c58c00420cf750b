#include "prefcon/config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <stdexcept>

#include "prefcon/digest.hpp"
#include "prefcon/question.hpp"

namespace prefcon {
namespace {

namespace fs = std::filesystem;

constexpr std::array<std::string_view, 18> kFields = {
    "experiment",  "test_path",   "dev_path",   "cap",          "few_shot_k",
    "labels",      "oracle",      "template",   "seed",         "output_dir",
    "cache_dir",   "concurrency", "max_retries", "retry_delay_ms", "max_tokens",
    "temperature", "option_count", "comment"};

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  const fs::path path(p);
  if (path.is_absolute() || base.empty()) return path;
  return base / path;
}

}  // namespace

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::kLabelBias: return "label_bias";
    case Experiment::kFormatSensitivity: return "format_sensitivity";
    case Experiment::kAsymmetryTransitivity: return "asymmetry_transitivity";
    case Experiment::kIia: return "iia";
    case Experiment::kReversibility: return "reversibility";
  }
  return "asymmetry_transitivity";
}

Experiment parse_experiment(std::string_view name) {
  for (auto e : {Experiment::kLabelBias, Experiment::kFormatSensitivity,
                 Experiment::kAsymmetryTransitivity, Experiment::kIia,
                 Experiment::kReversibility}) {
    if (to_string(e) == name) return e;
  }
  throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

bool oracle_spec_has_seed(const nlohmann::json& spec) {
  if (spec.is_object()) return spec.contains("seed");
  if (spec.is_string()) {
    const auto s = spec.get<std::string>();
    const auto colon = s.find(':');
    if (colon == std::string::npos) return false;
    const std::string opts = "," + s.substr(colon + 1);
    return opts.find(",seed=") != std::string::npos;
  }
  return false;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw std::invalid_argument("configuration must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(kFields.begin(), kFields.end(), key) == kFields.end()) {
      throw std::invalid_argument("unknown configuration field '" + key + "'");
    }
  }
  ExperimentConfig c;
  try {
    c.experiment = parse_experiment(j.at("experiment").get<std::string>());
    c.test_path = resolve(base_dir, j.at("test_path").get<std::string>());
    c.dev_path = resolve(base_dir, j.value("dev_path", std::string{}));
    c.cap = j.value("cap", c.cap);
    c.few_shot_k = j.value("few_shot_k", c.few_shot_k);
    c.labels = j.value("labels", c.labels);
    c.seed = j.value("seed", c.seed);
    if (j.contains("oracle")) {
      const auto& spec = j.at("oracle");
      c.oracle = OracleDescriptor::from_json(spec);
      if (!oracle_spec_has_seed(spec)) c.oracle.seed = c.seed;
    } else {
      c.oracle.seed = c.seed;
    }
    if (j.contains("template")) {
      const auto& t = j.at("template");
      c.template_name = t.value("name", c.template_name);
      c.template_version = t.value("version", c.template_version);
      c.template_path = resolve(base_dir, t.value("path", std::string{}));
    }
    c.output_dir = resolve(base_dir, j.value("output_dir", c.output_dir.string()));
    c.cache_dir = resolve(base_dir, j.value("cache_dir", std::string{}));
    c.concurrency = j.value("concurrency", c.concurrency);
    c.max_retries = j.value("max_retries", c.max_retries);
    c.retry_initial_delay =
        std::chrono::milliseconds(j.value("retry_delay_ms", c.retry_initial_delay.count()));
    c.decode.max_tokens = j.value("max_tokens", c.decode.max_tokens);
    c.decode.temperature = j.value("temperature", c.decode.temperature);
    c.option_count = j.value("option_count", c.option_count);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad configuration field: ") + e.what());
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open configuration " + path.string());
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw std::invalid_argument(path.string() + " is not valid JSON");
  return from_json(j, path.parent_path());
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j{
      {"experiment", to_string(experiment)},
      {"test_path", test_path.generic_string()},
      {"dev_path", dev_path.generic_string()},
      {"cap", cap},
      {"few_shot_k", few_shot_k},
      {"labels", labels},
      {"oracle", oracle.to_json()},
      {"template", {{"name", template_name}, {"version", template_version}}},
      {"seed", seed},
      {"output_dir", output_dir.generic_string()},
      {"cache_dir", effective_cache_dir().generic_string()},
      {"concurrency", concurrency},
      {"max_retries", max_retries},
      {"retry_delay_ms", retry_initial_delay.count()},
      {"max_tokens", decode.max_tokens},
      {"temperature", decode.temperature},
      {"option_count", option_count},
  };
  if (!template_path.empty()) j["template"]["path"] = template_path.generic_string();
  return j;
}

void ExperimentConfig::validate() const {
  if (cap == 0) throw std::invalid_argument("cap must be at least 1");
  if (concurrency == 0) throw std::invalid_argument("concurrency must be at least 1");
  if (option_count < 3) {
    throw std::invalid_argument("option_count must be at least 3 for the removal experiments");
  }
  if (decode.max_tokens <= 0) throw std::invalid_argument("max_tokens must be positive");
  if (retry_initial_delay.count() < 0) throw std::invalid_argument("retry_delay_ms is negative");
  if (test_path.empty()) throw std::invalid_argument("test_path is required");
  if (!fs::exists(test_path)) {
    throw std::invalid_argument("test_path " + test_path.string() + " does not exist");
  }
  if (few_shot_k > 0) {
    if (dev_path.empty()) throw std::invalid_argument("few_shot_k > 0 requires dev_path");
    if (!fs::exists(dev_path)) {
      throw std::invalid_argument("dev_path " + dev_path.string() + " does not exist");
    }
  }
  if (!template_path.empty() && !fs::exists(template_path)) {
    throw std::invalid_argument("template path " + template_path.string() + " does not exist");
  }
  (void)LabelSet::by_name(labels);
  oracle.validate();
}

fs::path ExperimentConfig::effective_cache_dir() const {
  return cache_dir.empty() ? output_dir / "cache" : cache_dir;
}

std::string ExperimentConfig::run_digest() const {
  const nlohmann::json j{
      {"experiment", to_string(experiment)},
      {"test_path", test_path.generic_string()},
      {"dev_path", dev_path.generic_string()},
      {"cap", cap},
      {"few_shot_k", few_shot_k},
      {"labels", labels},
      {"oracle", oracle.canonical()},
      {"template", template_name + "@" + std::to_string(template_version)},
      {"seed", seed},
      {"max_tokens", decode.max_tokens},
      {"temperature", decode.temperature},
      {"option_count", option_count},
  };
  return sha256_hex(j.dump());
}

}  // namespace prefcon
