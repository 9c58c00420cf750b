// prefcon: run consistency experiments against a preference oracle.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "prefcon/pipeline.hpp"
#include "prefcon/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Overrides {
  std::string config;
  std::string oracle;
  std::string experiment;
  std::string labels;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> cap;
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "Experiment configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--oracle", o.oracle, "Oracle spec, e.g. positional_bias:p=0.5");
  cmd->add_option("--experiment", o.experiment,
                  "label_bias | format_sensitivity | asymmetry_transitivity | iia | reversibility");
  cmd->add_option("--labels", o.labels, "alphabetic | arabic | roman");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--seed", o.seed, "Seed for sampling and synthetic oracles");
  cmd->add_option("--cap", o.cap, "Questions per subject");
}

prefcon::ExperimentConfig load_config(const Overrides& o) {
  const fs::path path(o.config);
  std::ifstream in(path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw std::invalid_argument(o.config + " is not a JSON object");
  }
  if (!o.oracle.empty()) j["oracle"] = o.oracle;
  if (!o.experiment.empty()) j["experiment"] = o.experiment;
  if (!o.labels.empty()) j["labels"] = o.labels;
  if (!o.out.empty()) j["output_dir"] = fs::absolute(o.out).string();
  if (o.seed) j["seed"] = *o.seed;
  if (o.cap) j["cap"] = *o.cap;
  return prefcon::ExperimentConfig::from_json(j, path.parent_path());
}

int cmd_run(const Overrides& o, std::optional<std::size_t> limit) {
  const auto config = load_config(o);
  const auto outcome = prefcon::run_experiment(config, prefcon::RunOptions{limit});
  const auto& s = outcome.stats;
  std::printf("planned %zu tasks: %zu cache hits (%.1f%%), %zu oracle calls, %zu failures, %zu not run\n",
              outcome.planned_tasks, s.cache_hits, 100.0 * s.cache_hit_rate(), s.oracle_calls,
              s.failures, s.not_run);
  if (outcome.skipped_records > 0) {
    std::printf("skipped %zu dataset records with the wrong option count\n", outcome.skipped_records);
  }
  std::printf("records: %s\nreport:  %s\n\n", outcome.paths.records.string().c_str(),
              outcome.paths.report_markdown.string().c_str());
  std::cout << prefcon::report_to_markdown(outcome.report);
  return s.not_run > 0 ? 3 : 0;
}

int cmd_report(const Overrides& o) {
  const auto config = load_config(o);
  const auto report = prefcon::write_reports(config);
  std::cout << prefcon::report_to_markdown(report);
  return 0;
}

int cmd_validate(std::uint64_t seed) {
  bool all = true;
  for (const auto& r : prefcon::run_self_checks(seed)) {
    std::printf("%s  %s (%s)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    all = all && r.passed;
  }
  const auto e = prefcon::enumerate_tournament_expectations(4);
  std::printf("\nrandom 4-option tournaments: pair-level transitivity %.3f, "
              "acyclic instances %.3f, transitive triples %.3f\n",
              e.pair_level, e.instance_level, e.triple_level);
  return all ? 0 : 1;
}

int cmd_baseline(const std::string& spec, std::size_t trials, std::size_t options) {
  const auto descriptor = prefcon::OracleDescriptor::parse(spec);
  if (descriptor.kind == prefcon::OracleKind::kRemote) {
    throw std::invalid_argument("baseline needs a synthetic oracle");
  }
  std::printf("oracle %s, %zu trials, %zu options\n\n", descriptor.canonical().c_str(), trials, options);
  std::printf("%-48s %8s %8s %8s\n", "metric", "mean%", "se%", "n");
  for (const auto& [name, m] : prefcon::run_baseline(descriptor, trials, options)) {
    std::printf("%-48s %8.2f %8.2f %8zu\n", name.c_str(), 100.0 * m.mean, 100.0 * m.std_error,
                m.samples);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Logical-consistency harness for preference oracles"};
  app.require_subcommand(1);

  Overrides run_o;
  std::optional<std::size_t> limit;
  auto* run = app.add_subcommand("run", "Plan, execute (cached) and report an experiment");
  add_override_flags(run, run_o);
  run->add_option("--limit", limit, "Stop after this many oracle calls (resume later)");

  Overrides report_o;
  auto* report = app.add_subcommand("report", "Re-aggregate stored records into reports");
  add_override_flags(report, report_o);

  std::uint64_t validate_seed = 0;
  auto* validate = app.add_subcommand("validate", "Run brute-force self-checks of the metric kernel");
  validate->add_option("--seed", validate_seed, "Seed for the randomised checks");

  std::string baseline_oracle = "random";
  std::size_t trials = 10000;
  std::size_t options = 4;
  auto* baseline = app.add_subcommand("baseline", "Monte-Carlo metrics for a synthetic oracle");
  baseline->add_option("--oracle", baseline_oracle, "Synthetic oracle spec")->capture_default_str();
  baseline->add_option("--trials", trials, "Synthetic questions")->capture_default_str();
  baseline->add_option("--options", options, "Options per question")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_o, limit);
    if (report->parsed()) return cmd_report(report_o);
    if (validate->parsed()) return cmd_validate(validate_seed);
    if (baseline->parsed()) return cmd_baseline(baseline_oracle, trials, options);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "prefcon: %s\n", e.what());
    return 1;
  }
  return 0;
}
