#pragma once

// Self-checks that need no oracle, and Monte-Carlo baselines for the
// synthetic oracles.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "prefcon/oracle.hpp"

namespace prefcon {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Brute-force cross-checks of the metric kernel: closure against DFS on
/// every 4-node tournament and on random partial relations, edit distance
/// against a full-table recurrence on every pair of short sequences, metric
/// axioms, and the closed-form expectations under random answers.
std::vector<CheckResult> run_self_checks(std::uint64_t seed = 0);

/// Expected transitivity under uniformly random 4-node tournaments: pair
/// level (the metric), instance level (fraction of acyclic tournaments) and
/// triple level (fraction of transitive triples). Computed by enumeration.
struct TournamentExpectations {
  double pair_level = 0.0;
  double instance_level = 0.0;
  double triple_level = 0.0;
};
TournamentExpectations enumerate_tournament_expectations(std::size_t n = 4);

struct BaselineMetric {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Runs every experiment's tasks for `trials` synthetic questions with
/// `option_count` options through the oracle, the text renderer and the
/// parser, and averages each report column over the questions that have a
/// value. Keys are "<experiment>/<column>". The oracle must be synthetic.
std::map<std::string, BaselineMetric> run_baseline(const OracleDescriptor& oracle,
                                                   std::size_t trials,
                                                   std::size_t option_count = 4);

}  // namespace prefcon
