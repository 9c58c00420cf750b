#pragma once

// Planning and cached execution.
//
// A plan is the full list of task instances an experiment needs. Execution
// renders each task, looks its prompt up in a content-addressed response
// cache, queries the oracle on a miss, parses the raw text and appends one
// record per task to an append-only JSONL store. Re-running a plan only
// appends records for tasks that are missing or failed, so an interrupted
// run resumes where it stopped.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "prefcon/config.hpp"
#include "prefcon/dataset.hpp"
#include "prefcon/oracle.hpp"
#include "prefcon/parsing.hpp"
#include "prefcon/protocol.hpp"
#include "prefcon/templates.hpp"

namespace prefcon {

struct Plan {
  Experiment experiment = Experiment::kAsymmetryTransitivity;
  std::vector<TaskInstance> tasks;
};

/// Tasks per question: label_bias 3 (one per built-in label set),
/// format_sensitivity 3, asymmetry_transitivity n(n-1), iia 1 + 5,
/// reversibility 2. Questions are visited in order; task keys are unique.
Plan plan_experiment(Experiment experiment, const std::vector<Question>& questions,
                     const TaskBuilder& builder, const LabelSet& labels, std::uint64_t seed);

/// Loads nothing; uses the dataset already read for `config`.
Plan plan_experiment(const ExperimentConfig& config, const Dataset& dataset);

nlohmann::json answer_to_json(const AnswerValue& value);
AnswerValue answer_from_json(const nlohmann::json& j);

/// One executed task. Identities are canonical option indices of the
/// original question, so records can be aggregated without the dataset.
struct RunRecord {
  std::string task_key;
  std::string question_id;
  std::string subject;
  std::string role;
  TaskFormat format = TaskFormat::kOrdinalRanking;
  Direction direction = Direction::kDescending;
  std::string labels;
  std::vector<OptionIndex> label_map;
  std::size_t option_count = 0;
  std::optional<OptionIndex> gold;
  std::optional<std::pair<OptionIndex, OptionIndex>> pair;
  std::optional<OptionIndex> removed;
  std::string template_id;
  std::string oracle;
  std::string cache_key;

  std::optional<std::string> response;
  /// Oracle failure after retries; no response in that case.
  std::optional<std::string> error_kind;
  std::optional<std::string> error_message;

  std::optional<AnswerValue> answer;
  std::optional<ParseFailure> failure;
  std::size_t ties = 0;

  bool succeeded() const { return response.has_value(); }
  bool parsed() const { return answer.has_value(); }

  nlohmann::json to_json() const;
  static RunRecord from_json(const nlohmann::json& j);
  bool operator==(const RunRecord& other) const { return to_json() == other.to_json(); }
};

/// Content-addressed store of raw oracle responses, one file per key at
/// `<dir>/<first two hex digits>/<key>.json`. Writes are atomic (temporary
/// file plus rename), so concurrent writers of the same key are harmless.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, const std::string& response,
           const nlohmann::json& meta = nlohmann::json::object()) const;

 private:
  std::filesystem::path path_for(const std::string& key) const;
  std::filesystem::path dir_;
};

/// Cache key: SHA-256 over the prompt, the oracle's canonical descriptor,
/// decoding parameters and template id, plus the task key for oracles whose
/// answers depend on it.
std::string cache_key(const std::string& prompt, const Oracle& oracle, const DecodeParams& decode,
                      const std::string& template_id, const std::string& task_key);

/// Append-only JSONL record file. Appends are serialised and flushed line by
/// line; a torn final line (from a crash) is ignored on load.
class RecordStore {
 public:
  explicit RecordStore(std::filesystem::path path);

  const std::filesystem::path& path() const { return path_; }
  /// All records in file order.
  std::vector<RunRecord> load() const;
  void append(const RunRecord& record);

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
  std::ofstream out_;
};

/// Latest successful record per task key, falling back to the latest
/// failed one. Result is ordered by task key.
std::vector<RunRecord> latest_records(const std::vector<RunRecord>& records);

struct RetryPolicy {
  std::size_t max_retries = 3;
  std::chrono::milliseconds initial_delay{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_delay{30000};

  std::chrono::milliseconds delay_for(std::size_t attempt) const;
};

struct ExecuteOptions {
  std::size_t concurrency = 4;
  RetryPolicy retry;
  DecodeParams decode;
  /// Stop issuing new oracle calls after this many; simulates an interrupted
  /// run. Cache hits are not counted.
  std::optional<std::size_t> call_limit;
};

struct ExecutionStats {
  std::size_t tasks = 0;
  std::size_t cache_hits = 0;
  std::size_t oracle_calls = 0;
  std::size_t retries = 0;
  std::size_t failures = 0;
  std::size_t appended = 0;
  std::size_t already_recorded = 0;
  std::size_t not_run = 0;
  std::size_t parse_failures = 0;

  double cache_hit_rate() const;
  nlohmann::json to_json() const;
};

/// Runs `plan`. Tasks that already have a successful record in `store` are
/// still looked up in the cache (and counted) but not appended again.
ExecutionStats execute_plan(const Plan& plan, const Oracle& oracle, const PromptTemplate& tmpl,
                            ResponseCache& cache, RecordStore& store,
                            const ExecuteOptions& options);

/// Paths of a run's artefacts inside the output directory.
struct RunPaths {
  std::filesystem::path records;
  std::filesystem::path report_json;
  std::filesystem::path report_csv;
  std::filesystem::path report_markdown;
  std::filesystem::path summary;
};
RunPaths run_paths(const ExperimentConfig& config);

/// Registry with the built-in template plus `config.template_path`, if set.
PromptTemplate resolve_template(const ExperimentConfig& config);

}  // namespace prefcon
