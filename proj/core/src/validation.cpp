#include "prefcon/validation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "prefcon/order.hpp"
#include "prefcon/parsing.hpp"
#include "prefcon/random.hpp"
#include "prefcon/report.hpp"
#include "prefcon/runner.hpp"
#include "prefcon/similarity.hpp"
#include "prefcon/synthetic_oracle.hpp"

namespace prefcon {
namespace {

// Reachability by depth-first search, independent of the matrix-power closure.
BoolMatrix dfs_reachability(const BoolMatrix& adj) {
  const std::size_t n = adj.size();
  BoolMatrix reach(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> stack{s};
    reach.set(s, s, true);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v) {
        if (adj.at(u, v) && !reach.at(s, v)) {
          reach.set(s, v, true);
          stack.push_back(v);
        }
      }
    }
  }
  return reach;
}

std::size_t full_table_distance(const std::vector<OptionIndex>& a, const std::vector<OptionIndex>& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
  }
  return d[a.size()][b.size()];
}

std::vector<std::vector<OptionIndex>> all_sequences(std::size_t max_len, std::size_t alphabet) {
  std::vector<std::vector<OptionIndex>> out{{}};
  std::vector<std::vector<OptionIndex>> frontier{{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<std::vector<OptionIndex>> next;
    for (const auto& s : frontier) {
      for (OptionIndex c = 0; c < alphabet; ++c) {
        auto t = s;
        t.push_back(c);
        next.push_back(t);
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

RelationMatrix tournament(std::size_t n, std::uint64_t mask) {
  RelationMatrix r(n);
  std::size_t bit = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++bit) {
      if ((mask >> bit) & 1U) {
        r.add_edge(i, j);
      } else {
        r.add_edge(j, i);
      }
    }
  }
  return r;
}

CheckResult check(std::string name, bool passed, std::string detail) {
  return CheckResult{std::move(name), passed, std::move(detail)};
}

std::string fixed(double v) {
  std::ostringstream s;
  s.precision(6);
  s << std::fixed << v;
  return s.str();
}

CheckResult check_closure_tournaments() {
  std::size_t mismatches = 0;
  for (std::uint64_t mask = 0; mask < 64; ++mask) {
    const auto r = tournament(4, mask);
    const auto closure = transitive_closure(r);
    if (!(closure == dfs_reachability(r.bits()))) ++mismatches;
    const auto report = transitivity_score(r);
    std::size_t on_cycle = 0;
    for (const auto& [i, j] : r.resolved_pairs()) {
      const auto reach = dfs_reachability(r.bits());
      if (reach.at(i, j) && reach.at(j, i)) ++on_cycle;
    }
    if (report.pairs_on_cycles != on_cycle) ++mismatches;
  }
  return check("closure matches DFS on all 64 four-node tournaments", mismatches == 0,
               std::to_string(mismatches) + " mismatches");
}

CheckResult check_closure_random(std::uint64_t seed) {
  SeededRng rng(seed, "self-check|closure");
  std::size_t mismatches = 0;
  constexpr std::size_t kTrials = 500;
  for (std::size_t t = 0; t < kTrials; ++t) {
    const std::size_t n = 2 + rng.below(6);
    RelationMatrix r(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        switch (rng.below(3)) {
          case 0: r.add_edge(i, j); break;
          case 1: r.add_edge(j, i); break;
          default: break;
        }
      }
    }
    const auto closure = transitive_closure(r);
    if (!(closure == dfs_reachability(r.bits()))) ++mismatches;
    if (!(transitive_closure(closure) == closure)) ++mismatches;
    if (!r.bits().contained_in(closure)) ++mismatches;
    if (!(transitive_closure(r.transposed()) == closure.transposed())) ++mismatches;
  }
  return check("closure matches DFS, is idempotent and contains R on random partial relations",
               mismatches == 0,
               std::to_string(mismatches) + " mismatches over " + std::to_string(kTrials));
}

CheckResult check_triangles(std::uint64_t seed) {
  SeededRng rng(seed, "self-check|triangles");
  std::size_t mismatches = 0;
  for (std::size_t t = 0; t < 300; ++t) {
    const std::size_t n = 2 + rng.below(5);
    BinaryComparisonMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) m.set(i, j, static_cast<Preference>(static_cast<int>(rng.below(3)) - 1));
      }
    }
    const auto upper = triangle_to_relation(m, Triangle::kUpper, Relation::kSucceeds);
    const auto lower = triangle_to_relation(m, Triangle::kLower, Relation::kSucceeds);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto u = m.at(i, j);
        if (upper.at(i, j) != (u == Preference::kFirst)) ++mismatches;
        if (upper.at(j, i) != (u == Preference::kSecond)) ++mismatches;
        const auto l = m.at(j, i);
        if (lower.at(j, i) != (l == Preference::kFirst)) ++mismatches;
        if (lower.at(i, j) != (l == Preference::kSecond)) ++mismatches;
      }
    }
    if (!(triangle_to_relation(m, Triangle::kUpper, Relation::kPrecedes) == upper.transposed())) {
      ++mismatches;
    }
  }
  return check("triangle reading follows the orientation rule; precedes is the transpose",
               mismatches == 0, std::to_string(mismatches) + " mismatches");
}

CheckResult check_edit_distance() {
  const auto seqs = all_sequences(4, 4);
  const std::size_t s = seqs.size();
  std::vector<std::size_t> dist(s * s);
  std::size_t mismatches = 0;
  for (std::size_t a = 0; a < s; ++a) {
    for (std::size_t b = 0; b < s; ++b) {
      const std::size_t d = min_edit_distance(seqs[a], seqs[b]);
      dist[a * s + b] = d;
      if (d != full_table_distance(seqs[a], seqs[b])) ++mismatches;
      if ((d == 0) != (a == b)) ++mismatches;
    }
  }
  std::size_t axiom_violations = 0;
  for (std::size_t a = 0; a < s; ++a) {
    for (std::size_t b = 0; b < s; ++b) {
      if (dist[a * s + b] != dist[b * s + a]) ++axiom_violations;
      for (std::size_t c = 0; c < s; ++c) {
        if (dist[a * s + c] > dist[a * s + b] + dist[b * s + c]) ++axiom_violations;
      }
    }
  }
  return check("edit distance matches the full-table recurrence and metric axioms on all " +
                   std::to_string(s * s) + " pairs of length <= 4",
               mismatches == 0 && axiom_violations == 0,
               std::to_string(mismatches) + " mismatches, " + std::to_string(axiom_violations) +
                   " axiom violations");
}

CheckResult check_ranking_metrics() {
  std::vector<OptionIndex> base{0, 1, 2, 3};
  std::vector<PreferenceRanking> perms;
  do {
    perms.emplace_back(base);
  } while (std::next_permutation(base.begin(), base.end()));
  std::size_t violations = 0;
  for (const auto& a : perms) {
    for (const auto& b : perms) {
      const double sim = normalized_similarity(a, b);
      if (sim < 0.0 || sim > 1.0) ++violations;
      if ((sim == 1.0) != (a == b)) ++violations;
      const std::size_t prefix = prefix_match_length(a, b);
      if (prefix > a.size() || (prefix == a.size()) != (a == b)) ++violations;
      for (std::size_t k = 0; k < prefix; ++k) {
        if (a[k] != b[k]) ++violations;
      }
    }
    for (OptionIndex g = 0; g < 4; ++g) {
      for (std::size_t n = 1; n <= 4; ++n) {
        if (hit_rate(a, g, n) != (a.position_of(g) < n)) ++violations;
      }
      if (!hit_rate(a, g, 4)) ++violations;
    }
  }
  return check("similarity, prefix match and hit rate behave on all 576 permutation pairs",
               violations == 0, std::to_string(violations) + " violations");
}

CheckResult check_expectations() {
  const auto e = enumerate_tournament_expectations(4);
  const bool ok = std::abs(e.pair_level - 0.5) < 1e-12 && std::abs(e.instance_level - 0.375) < 1e-12 &&
                  std::abs(e.triple_level - 0.75) < 1e-12;
  return check("expected transitivity under random tournaments", ok,
               "pair " + fixed(e.pair_level) + ", instance " + fixed(e.instance_level) +
                   ", triple " + fixed(e.triple_level));
}

CheckResult check_asymmetry_expectation() {
  // Every assignment of signs to the 12 off-diagonal cells of a 4x4 matrix.
  double total = 0.0;
  for (std::uint32_t mask = 0; mask < (1U << 12); ++mask) {
    BinaryComparisonMatrix m(4);
    std::size_t bit = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        if (i == j) continue;
        m.set(i, j, ((mask >> bit++) & 1U) ? Preference::kFirst : Preference::kSecond);
      }
    }
    total += *asymmetry_score(m).score;
  }
  const double mean = total / 4096.0;
  return check("expected asymmetry under random answers", std::abs(mean - 0.5) < 1e-12,
               fixed(mean));
}

}  // namespace

TournamentExpectations enumerate_tournament_expectations(std::size_t n) {
  const std::size_t pairs = n * (n - 1) / 2;
  const std::uint64_t count = std::uint64_t{1} << pairs;
  double pair_sum = 0.0;
  std::size_t acyclic = 0;
  std::size_t transitive_triples = 0;
  std::size_t triples = 0;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    const auto r = tournament(n, mask);
    const auto report = transitivity_score(r);
    pair_sum += *report.score;
    if (report.pairs_on_cycles == 0) ++acyclic;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        for (std::size_t c = b + 1; c < n; ++c) {
          ++triples;
          const bool cyclic = (r.at(a, b) && r.at(b, c) && r.at(c, a)) ||
                              (r.at(b, a) && r.at(c, b) && r.at(a, c));
          if (!cyclic) ++transitive_triples;
        }
      }
    }
  }
  return TournamentExpectations{pair_sum / static_cast<double>(count),
                                static_cast<double>(acyclic) / static_cast<double>(count),
                                static_cast<double>(transitive_triples) / static_cast<double>(triples)};
}

std::vector<CheckResult> run_self_checks(std::uint64_t seed) {
  return {check_closure_tournaments(),   check_closure_random(seed), check_triangles(seed),
          check_edit_distance(),         check_ranking_metrics(),    check_expectations(),
          check_asymmetry_expectation()};
}

std::map<std::string, BaselineMetric> run_baseline(const OracleDescriptor& descriptor,
                                                   std::size_t trials, std::size_t option_count) {
  if (trials == 0) throw std::invalid_argument("baseline needs at least one trial");
  const SyntheticOracle oracle(descriptor);
  const TaskBuilder builder(nullptr, 0);
  const LabelSet labels = LabelSet::alphabetic();

  std::map<std::string, std::vector<double>> samples;
  for (std::size_t t = 0; t < trials; ++t) {
    Question q;
    q.id = "baseline/" + std::to_string(t);
    q.subject = "baseline";
    q.stem = "Synthetic question " + std::to_string(t);
    for (std::size_t k = 0; k < option_count; ++k) q.options.push_back("option " + std::to_string(k));
    q.gold = SeededRng(descriptor.seed, "baseline-gold|" + q.id).below(option_count);
    const std::vector<Question> one{q};

    for (auto experiment : {Experiment::kLabelBias, Experiment::kFormatSensitivity,
                            Experiment::kAsymmetryTransitivity, Experiment::kIia,
                            Experiment::kReversibility}) {
      const Plan plan = plan_experiment(experiment, one, builder, labels, descriptor.seed);
      std::vector<RunRecord> records;
      records.reserve(plan.tasks.size());
      for (const auto& task : plan.tasks) {
        RunRecord r;
        r.task_key = task.key;
        r.question_id = q.id;
        r.subject = q.subject;
        r.role = task.role;
        r.format = task.format;
        r.direction = task.direction;
        r.option_count = option_count;
        r.gold = q.gold;
        r.pair = task.pair;
        r.removed = task.removed;
        const OracleRequest request{std::string{}, DecodeParams{}, task.key, "baseline", &task};
        r.response = oracle.answer(request);
        ParseOutcome outcome = parse_answer(*r.response, task);
        if (outcome.ok()) r.answer = outcome.value();
        records.push_back(std::move(r));
      }
      std::vector<const RunRecord*> ptrs;
      for (const auto& r : records) ptrs.push_back(&r);
      for (const auto& [column, value] : question_metrics(experiment, ptrs)) {
        if (value) samples[std::string(to_string(experiment)) + "/" + column].push_back(*value);
      }
    }
  }

  std::map<std::string, BaselineMetric> out;
  for (const auto& [key, values] : samples) {
    BaselineMetric m;
    m.samples = values.size();
    m.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (values.size() > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - m.mean) * (v - m.mean);
      m.std_error = std::sqrt(ss / static_cast<double>(values.size() - 1)) /
                    std::sqrt(static_cast<double>(values.size()));
    }
    out.emplace(key, m);
  }
  return out;
}

}  // namespace prefcon
