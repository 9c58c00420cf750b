#include "prefcon/report.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "prefcon/order.hpp"
#include "prefcon/similarity.hpp"

namespace prefcon {
namespace {

using nlohmann::json;
using Metrics = std::map<std::string, std::optional<double>>;

std::optional<PreferenceRanking> ranking_of(const RunRecord* r) {
  if (r == nullptr || !r->answer) return std::nullopt;
  if (const auto* ranking = std::get_if<RankingAnswer>(&*r->answer)) return ranking->ranking;
  if (const auto* scores = std::get_if<ScoresAnswer>(&*r->answer)) {
    return scores_to_ranking(scores->scores);
  }
  return std::nullopt;
}

std::optional<double> indicator(bool b) { return b ? 1.0 : 0.0; }

const RunRecord* find_role(const std::vector<const RunRecord*>& records, std::string_view role) {
  for (const auto* r : records) {
    if (r->role == role) return r;
  }
  return nullptr;
}

std::optional<double> mean_of(std::initializer_list<std::optional<double>> values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

Metrics label_bias_metrics(const std::vector<const RunRecord*>& records) {
  Metrics m;
  std::map<std::string, std::optional<PreferenceRanking>> rankings;
  std::optional<OptionIndex> gold;
  for (std::string_view set : {"alphabetic", "arabic", "roman"}) {
    const auto* r = find_role(records, "labels:" + std::string(set));
    if (r) gold = r->gold;
    rankings[std::string(set)] = ranking_of(r);
  }
  for (std::string_view set : {"alphabetic", "arabic", "roman"}) {
    const auto& ranking = rankings[std::string(set)];
    auto& cell = m[std::string(set) + ".acc@1"];
    if (ranking && gold && !ranking->empty()) cell = indicator((*ranking)[0] == *gold);
  }
  const auto& reference = rankings["alphabetic"];
  for (std::string_view set : {"arabic", "roman"}) {
    const auto& ranking = rankings[std::string(set)];
    auto& cell = m[std::string(set) + ".sim"];
    if (reference && ranking && !reference->empty()) {
      cell = normalized_similarity(*reference, *ranking);
    }
  }
  return m;
}

Metrics format_metrics(const std::vector<const RunRecord*>& records) {
  Metrics m;
  const auto* single = find_role(records, "format:single_select");
  auto& acc = m["single_select.acc"];
  if (single && single->answer && single->gold) {
    if (const auto* s = std::get_if<SelectionAnswer>(&*single->answer)) {
      acc = indicator(s->option == *single->gold);
    }
  }
  for (std::string_view fmt : {"ordinal", "cardinal"}) {
    const auto* r = find_role(records, "format:" + std::string(fmt) + "_ranking");
    const auto ranking = ranking_of(r);
    for (std::size_t n = 1; n <= 3; ++n) {
      auto& cell = m[std::string(fmt) + ".hit@" + std::to_string(n)];
      if (ranking && r->gold) cell = indicator(hit_rate(*ranking, *r->gold, n));
    }
  }
  return m;
}

Metrics pair_metrics(const std::vector<const RunRecord*>& records) {
  Metrics m{{"asymmetry", std::nullopt},
            {"transitivity.upper", std::nullopt},
            {"transitivity.lower", std::nullopt},
            {"transitivity.avg", std::nullopt}};
  std::size_t n = 0;
  for (const auto* r : records) {
    if (r->pair) n = std::max(n, r->option_count);
  }
  if (n < 2) return m;
  BinaryComparisonMatrix matrix(n);
  for (const auto* r : records) {
    if (!r->pair || !r->answer) continue;
    const auto* choice = std::get_if<PairAnswer>(&*r->answer);
    if (choice == nullptr) continue;
    matrix.set(r->pair->first, r->pair->second, choice->choice);
  }
  m["asymmetry"] = asymmetry_score(matrix).score;
  const auto upper =
      transitivity_score(triangle_to_relation(matrix, Triangle::kUpper, Relation::kSucceeds)).score;
  const auto lower =
      transitivity_score(triangle_to_relation(matrix, Triangle::kLower, Relation::kSucceeds)).score;
  m["transitivity.upper"] = upper;
  m["transitivity.lower"] = lower;
  m["transitivity.avg"] = mean_of({upper, lower});
  return m;
}

Metrics iia_metrics(const std::vector<const RunRecord*>& records) {
  Metrics m;
  const auto full = ranking_of(find_role(records, "iia:full"));
  for (auto policy : kAllRemovalPolicies) {
    const std::string name(to_string(policy));
    const auto* r = find_role(records, "iia:" + name);
    const auto reduced = ranking_of(r);
    auto& cell = m["sim." + name];
    if (full && reduced && r->removed && full->contains(*r->removed) && full->size() > 1) {
      cell = normalized_similarity(full->without(*r->removed), *reduced);
    }
  }
  return m;
}

Metrics reversibility_metrics(const std::vector<const RunRecord*>& records) {
  Metrics m{{"match@1", std::nullopt},
            {"match@2", std::nullopt},
            {"match@3", std::nullopt},
            {"sim", std::nullopt}};
  const auto desc = ranking_of(find_role(records, "rev:descending"));
  const auto asc = ranking_of(find_role(records, "rev:ascending"));
  if (!desc || !asc || desc->empty()) return m;
  const PreferenceRanking flipped = asc->reversed();
  const std::size_t prefix = prefix_match_length(*desc, flipped);
  for (std::size_t k = 1; k <= 3; ++k) m["match@" + std::to_string(k)] = indicator(prefix >= k);
  m["sim"] = normalized_similarity(*desc, flipped);
  return m;
}

std::string percent(const std::optional<double>& v, int decimals) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, *v * 100.0);
  return buf;
}

json cell_to_json(const MetricCell& c) {
  json j{{"count", c.count}, {"total", c.total}};
  j["value"] = c.value ? json(*c.value) : json(nullptr);
  j["percent"] = c.value ? json(*c.value * 100.0) : json(nullptr);
  return j;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<std::string> metric_columns(Experiment experiment) {
  switch (experiment) {
    case Experiment::kLabelBias:
      return {"alphabetic.acc@1", "arabic.acc@1", "roman.acc@1", "arabic.sim", "roman.sim"};
    case Experiment::kFormatSensitivity:
      return {"single_select.acc", "ordinal.hit@1",  "ordinal.hit@2", "ordinal.hit@3",
              "cardinal.hit@1",    "cardinal.hit@2", "cardinal.hit@3"};
    case Experiment::kAsymmetryTransitivity:
      return {"asymmetry", "transitivity.upper", "transitivity.lower", "transitivity.avg"};
    case Experiment::kIia: {
      std::vector<std::string> cols;
      for (auto policy : kAllRemovalPolicies) cols.push_back("sim." + std::string(to_string(policy)));
      return cols;
    }
    case Experiment::kReversibility:
      return {"match@1", "match@2", "match@3", "sim"};
  }
  return {};
}

std::map<std::string, std::optional<double>> question_metrics(
    Experiment experiment, const std::vector<const RunRecord*>& records) {
  switch (experiment) {
    case Experiment::kLabelBias: return label_bias_metrics(records);
    case Experiment::kFormatSensitivity: return format_metrics(records);
    case Experiment::kAsymmetryTransitivity: return pair_metrics(records);
    case Experiment::kIia: return iia_metrics(records);
    case Experiment::kReversibility: return reversibility_metrics(records);
  }
  return {};
}

const MetricCell& ExperimentReport::cell(const std::string& column) const {
  const auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end()) throw std::out_of_range("no metric column " + column);
  return overall.at(static_cast<std::size_t>(it - columns.begin()));
}

ExperimentReport aggregate(Experiment experiment, const std::vector<RunRecord>& records) {
  if (records.empty()) throw std::invalid_argument("cannot aggregate an empty record set");
  const std::vector<RunRecord> latest = latest_records(records);

  ExperimentReport report;
  report.experiment = experiment;
  report.columns = metric_columns(experiment);

  std::set<std::string> oracles;
  std::set<std::string> templates;
  // subject -> question id -> records
  std::map<std::string, std::map<std::string, std::vector<const RunRecord*>>> grouped;
  for (const auto& r : latest) {
    grouped[r.subject][r.question_id].push_back(&r);
    oracles.insert(r.oracle);
    templates.insert(r.template_id);
    auto& cov = report.coverage;
    ++cov.tasks;
    if (r.succeeded()) ++cov.responded;
    if (r.parsed()) ++cov.parsed;
    cov.ties += r.ties;
    if (r.failure) {
      ++cov.parse_failures[std::string(to_string(r.failure->kind))];
      if (r.failure->kind == ParseFailureKind::kDuplicateLabel) ++cov.irreflexivity_violations;
    }
    if (r.error_kind) ++cov.oracle_failures[*r.error_kind];
  }
  const auto join = [](const std::set<std::string>& s) {
    std::string out;
    for (const auto& x : s) out += (out.empty() ? "" : ";") + x;
    return out;
  };
  report.oracle = join(oracles);
  report.template_id = join(templates);

  const std::size_t cols = report.columns.size();
  std::vector<double> macro_sum(cols, 0.0);
  std::vector<std::size_t> macro_n(cols, 0);
  report.overall.assign(cols, MetricCell{});

  for (const auto& [subject, questions] : grouped) {
    report.subjects.push_back(subject);
    std::vector<double> sum(cols, 0.0);
    std::vector<MetricCell> cells(cols);
    for (const auto& [qid, recs] : questions) {
      const auto metrics = question_metrics(experiment, recs);
      for (std::size_t c = 0; c < cols; ++c) {
        ++cells[c].total;
        const auto it = metrics.find(report.columns[c]);
        if (it != metrics.end() && it->second) {
          sum[c] += *it->second;
          ++cells[c].count;
        }
      }
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (cells[c].count > 0) {
        cells[c].value = sum[c] / static_cast<double>(cells[c].count);
        macro_sum[c] += *cells[c].value;
        ++macro_n[c];
      }
      report.overall[c].count += cells[c].count;
      report.overall[c].total += cells[c].total;
    }
    report.by_subject.emplace(subject, std::move(cells));
  }
  for (std::size_t c = 0; c < cols; ++c) {
    if (macro_n[c] > 0) report.overall[c].value = macro_sum[c] / static_cast<double>(macro_n[c]);
  }
  return report;
}

json report_to_json(const ExperimentReport& report, const ExperimentConfig* config) {
  json j;
  j["experiment"] = to_string(report.experiment);
  j["oracle"] = report.oracle;
  j["template"] = report.template_id;
  j["averaging"] = "macro: questions within a subject, then subjects";
  j["columns"] = report.columns;
  json overall = json::object();
  for (std::size_t c = 0; c < report.columns.size(); ++c) {
    overall[report.columns[c]] = cell_to_json(report.overall[c]);
  }
  j["overall"] = overall;
  json subjects = json::object();
  for (const auto& subject : report.subjects) {
    json row = json::object();
    const auto& cells = report.by_subject.at(subject);
    for (std::size_t c = 0; c < report.columns.size(); ++c) {
      row[report.columns[c]] = cell_to_json(cells[c]);
    }
    subjects[subject] = row;
  }
  j["subjects"] = subjects;
  const auto& cov = report.coverage;
  j["coverage"] = {{"tasks", cov.tasks},
                   {"responded", cov.responded},
                   {"parsed", cov.parsed},
                   {"parse_rate", cov.tasks ? static_cast<double>(cov.parsed) /
                                                  static_cast<double>(cov.tasks)
                                            : 0.0},
                   {"ties", cov.ties},
                   {"irreflexivity_violations", cov.irreflexivity_violations},
                   {"parse_failures", cov.parse_failures},
                   {"oracle_failures", cov.oracle_failures}};
  if (config != nullptr) j["config"] = config->to_json();
  return j;
}

std::string report_to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "subject,metric,value_pct,count,total\n";
  const auto row = [&](const std::string& subject, const std::vector<MetricCell>& cells) {
    for (std::size_t c = 0; c < report.columns.size(); ++c) {
      out << csv_escape(subject) << ',' << report.columns[c] << ','
          << (cells[c].value ? percent(cells[c].value, 4) : "") << ',' << cells[c].count << ','
          << cells[c].total << '\n';
    }
  };
  row("(macro)", report.overall);
  for (const auto& subject : report.subjects) row(subject, report.by_subject.at(subject));
  return out.str();
}

std::string report_to_markdown(const ExperimentReport& report) {
  std::ostringstream out;
  out << "# " << to_string(report.experiment) << "\n\n";
  out << "Oracle: `" << report.oracle << "`  \nTemplate: `" << report.template_id << "`\n\n";
  out << "| Subject |";
  for (const auto& c : report.columns) out << ' ' << c << " |";
  out << "\n|---|";
  for (std::size_t c = 0; c < report.columns.size(); ++c) out << "---:|";
  out << '\n';
  const auto row = [&](const std::string& subject, const std::vector<MetricCell>& cells) {
    out << "| " << subject << " |";
    for (const auto& cell : cells) out << ' ' << percent(cell.value, 1) << " |";
    out << '\n';
  };
  row("**macro**", report.overall);
  for (const auto& subject : report.subjects) row(subject, report.by_subject.at(subject));

  out << "\nQuestions contributing per metric (of total):";
  for (std::size_t c = 0; c < report.columns.size(); ++c) {
    out << (c ? ", " : " ") << report.columns[c] << ' ' << report.overall[c].count << '/'
        << report.overall[c].total;
  }
  const auto& cov = report.coverage;
  out << "\n\nTasks: " << cov.tasks << ", responded: " << cov.responded
      << ", parsed: " << cov.parsed << ", irreflexivity violations: "
      << cov.irreflexivity_violations << ", score ties broken: " << cov.ties << '\n';
  if (!cov.parse_failures.empty()) {
    out << "\nParse failures:";
    for (const auto& [kind, n] : cov.parse_failures) out << ' ' << kind << '=' << n;
    out << '\n';
  }
  if (!cov.oracle_failures.empty()) {
    out << "\nOracle failures:";
    for (const auto& [kind, n] : cov.oracle_failures) out << ' ' << kind << '=' << n;
    out << '\n';
  }
  return out.str();
}

}  // namespace prefcon
