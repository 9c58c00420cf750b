#pragma once

// Aggregation of run records into metric tables.
//
// Each metric is computed per question, averaged over the questions of a
// subject, then averaged over subjects (macro average). A question
// contributes to a metric only when the tasks it needs parsed; every cell
// carries how many questions contributed and how many could have.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "prefcon/config.hpp"
#include "prefcon/runner.hpp"

namespace prefcon {

struct MetricCell {
  std::optional<double> value;  ///< fraction in [0, 1]
  std::size_t count = 0;        ///< questions that contributed
  std::size_t total = 0;        ///< questions that could have contributed
  bool operator==(const MetricCell&) const = default;
};

struct Coverage {
  std::size_t tasks = 0;
  std::size_t responded = 0;
  std::size_t parsed = 0;
  std::size_t ties = 0;
  /// Rankings that repeated a label.
  std::size_t irreflexivity_violations = 0;
  std::map<std::string, std::size_t> parse_failures;   ///< by failure kind
  std::map<std::string, std::size_t> oracle_failures;  ///< by error kind
  bool operator==(const Coverage&) const = default;
};

struct ExperimentReport {
  Experiment experiment = Experiment::kAsymmetryTransitivity;
  std::string oracle;
  std::string template_id;
  std::vector<std::string> columns;
  /// Subjects in lexicographic order.
  std::vector<std::string> subjects;
  std::map<std::string, std::vector<MetricCell>> by_subject;
  std::vector<MetricCell> overall;
  Coverage coverage;

  const MetricCell& cell(const std::string& column) const;
  bool operator==(const ExperimentReport&) const = default;
};

/// Metric columns of an experiment, in report order.
std::vector<std::string> metric_columns(Experiment experiment);

/// Deterministic and independent of record order: duplicates are resolved
/// by latest_records() and everything is keyed by task key. Throws
/// std::invalid_argument for an empty record set.
ExperimentReport aggregate(Experiment experiment, const std::vector<RunRecord>& records);

/// Per-question metric values, keyed by column name. Exposed for tests.
std::map<std::string, std::optional<double>> question_metrics(
    Experiment experiment, const std::vector<const RunRecord*>& records);

/// `config` may be null; when given it is echoed into the report.
nlohmann::json report_to_json(const ExperimentReport& report,
                              const ExperimentConfig* config = nullptr);
/// Long format: subject,metric,value_pct,count,total.
std::string report_to_csv(const ExperimentReport& report);
/// Values rendered x100 with one decimal; a dash marks an empty cell.
std::string report_to_markdown(const ExperimentReport& report);

}  // namespace prefcon
