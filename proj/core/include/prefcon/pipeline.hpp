#pragma once

// End-to-end driver: load the dataset, plan, execute against the cache and
// record store, aggregate and write the reports.

#include <cstddef>
#include <optional>

#include "prefcon/config.hpp"
#include "prefcon/report.hpp"
#include "prefcon/runner.hpp"

namespace prefcon {

struct RunOptions {
  /// See ExecuteOptions::call_limit.
  std::optional<std::size_t> call_limit;
};

struct RunOutcome {
  ExecutionStats stats;
  ExperimentReport report;
  RunPaths paths;
  std::size_t planned_tasks = 0;
  std::size_t skipped_records = 0;
};

/// Uses the oracle the configuration names.
RunOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options = {});
/// Uses `oracle` instead; its descriptor still keys the cache.
RunOutcome run_experiment(const ExperimentConfig& config, const Oracle& oracle,
                          const RunOptions& options = {});

/// Re-aggregates the record store of `config` and rewrites the reports.
/// Execution statistics go to the run summary, never into the reports, so
/// reports of identical record sets are byte-identical.
ExperimentReport write_reports(const ExperimentConfig& config);

}  // namespace prefcon
