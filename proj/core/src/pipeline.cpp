#include "prefcon/pipeline.hpp"

#include <fstream>
#include <stdexcept>

#include "prefcon/dataset.hpp"

namespace prefcon {
namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
  }
  fs::rename(tmp, path);
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  const auto oracle = make_oracle(config.oracle);
  return run_experiment(config, *oracle, options);
}

RunOutcome run_experiment(const ExperimentConfig& config, const Oracle& oracle,
                          const RunOptions& options) {
  config.validate();
  const Dataset dataset = load_dataset(config.test_path, config.dev_path,
                                       LoadOptions{config.cap, config.option_count});
  const Plan plan = plan_experiment(config, dataset);
  const PromptTemplate tmpl = resolve_template(config);

  fs::create_directories(config.output_dir);
  RunOutcome outcome;
  outcome.paths = run_paths(config);
  outcome.planned_tasks = plan.tasks.size();
  outcome.skipped_records = dataset.skipped_records;

  ResponseCache cache(config.effective_cache_dir());
  RecordStore store(outcome.paths.records);
  ExecuteOptions exec;
  exec.concurrency = config.concurrency;
  exec.retry.max_retries = config.max_retries;
  exec.retry.initial_delay = config.retry_initial_delay;
  exec.decode = config.decode;
  exec.call_limit = options.call_limit;
  outcome.stats = execute_plan(plan, oracle, tmpl, cache, store, exec);

  outcome.report = write_reports(config);

  nlohmann::json summary = outcome.stats.to_json();
  summary["planned_tasks"] = outcome.planned_tasks;
  summary["questions"] = dataset.questions.size();
  summary["subjects"] = dataset.subjects.size();
  summary["skipped_records"] = dataset.skipped_records;
  summary["records"] = outcome.paths.records.generic_string();
  write_text(outcome.paths.summary, summary.dump(2) + "\n");
  return outcome;
}

ExperimentReport write_reports(const ExperimentConfig& config) {
  const RunPaths paths = run_paths(config);
  RecordStore store(paths.records);
  const auto records = store.load();
  if (records.empty()) {
    throw std::runtime_error("no records at " + paths.records.string() + "; run the experiment first");
  }
  ExperimentReport report = aggregate(config.experiment, records);
  fs::create_directories(config.output_dir);
  write_text(paths.report_json, report_to_json(report, &config).dump(2) + "\n");
  write_text(paths.report_csv, report_to_csv(report));
  write_text(paths.report_markdown, report_to_markdown(report));
  return report;
}

}  // namespace prefcon
