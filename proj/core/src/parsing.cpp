#include "prefcon/parsing.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

namespace prefcon {
namespace {

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string_view first_nonempty_line(std::string_view region) {
  std::size_t pos = 0;
  while (pos <= region.size()) {
    const auto nl = region.find('\n', pos);
    const auto line = trim(region.substr(pos, nl == std::string_view::npos ? region.npos : nl - pos));
    if (!line.empty()) return line;
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return {};
}

/// Scheme positions of every standalone label token in `text`, in order.
/// At each offset the longest token that satisfies the boundary rule wins.
std::vector<std::size_t> scan_labels(std::string_view text, const LabelSet& labels) {
  std::vector<std::size_t> found;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::optional<std::size_t> best;
    std::size_t best_len = 0;
    for (std::size_t k = 0; k < labels.size(); ++k) {
      const std::string& tok = labels.token(k);
      if (tok.size() <= best_len || text.compare(pos, tok.size(), tok) != 0) continue;
      const std::size_t end = pos + tok.size();
      // Tokens such as "(1)" carry their own delimiters; word characters at
      // a token edge need a non-word neighbour.
      const bool left_ok = pos == 0 || !is_word_char(text[pos - 1]) || !is_word_char(tok.front());
      const bool right_ok = end == text.size() || !is_word_char(text[end]) || !is_word_char(tok.back());
      if (left_ok && right_ok) {
        best = k;
        best_len = tok.size();
      }
    }
    if (best) {
      found.push_back(*best);
      pos += best_len;
    } else {
      ++pos;
    }
  }
  return found;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

ParseFailure failure(ParseFailureKind kind, std::string detail,
                     std::optional<PreferenceRanking> partial = std::nullopt) {
  return ParseFailure{kind, std::move(detail), std::move(partial)};
}

}  // namespace

std::string_view to_string(ParseFailureKind kind) {
  switch (kind) {
    case ParseFailureKind::kDuplicateLabel: return "duplicate_label";
    case ParseFailureKind::kUnknownLabel: return "unknown_label";
    case ParseFailureKind::kMissingLabels: return "missing_labels";
    case ParseFailureKind::kNoAnswerFound: return "no_answer_found";
    case ParseFailureKind::kAmbiguous: return "ambiguous";
  }
  return "ambiguous";
}

ParseFailureKind parse_failure_kind(std::string_view name) {
  for (auto k : {ParseFailureKind::kDuplicateLabel, ParseFailureKind::kUnknownLabel,
                 ParseFailureKind::kMissingLabels, ParseFailureKind::kNoAnswerFound,
                 ParseFailureKind::kAmbiguous}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown parse failure kind '" + std::string(name) + "'");
}

std::string_view answer_region(std::string_view text, std::string_view marker) {
  if (marker.empty()) return text;
  const auto at = text.rfind(marker);
  if (at == std::string_view::npos) return text;
  return text.substr(at + marker.size());
}

ParseOutcome parse_selection(std::string_view text, const LabeledQuestion& q,
                             std::string_view marker) {
  const auto line = first_nonempty_line(answer_region(text, marker));
  const auto found = scan_labels(line, q.labels);
  if (found.empty()) return failure(ParseFailureKind::kNoAnswerFound, "no label in answer");
  const std::size_t pos = found.front();
  if (pos >= q.label_map.size()) {
    return failure(ParseFailureKind::kUnknownLabel, "label " + q.labels.token(pos) + " not shown");
  }
  return AnswerValue{SelectionAnswer{q.label_map[pos]}};
}

ParseOutcome parse_ranking(std::string_view text, const LabeledQuestion& q,
                           std::size_t expected_n, std::string_view marker) {
  if (expected_n < 2) throw std::invalid_argument("ranking parse needs expected_n >= 2");
  const auto line = first_nonempty_line(answer_region(text, marker));
  const auto found = scan_labels(line, q.labels);
  if (found.empty()) return failure(ParseFailureKind::kNoAnswerFound, "no label in answer");

  std::vector<OptionIndex> order;
  std::set<std::size_t> seen;
  for (std::size_t pos : found) {
    if (pos >= q.label_map.size()) {
      return failure(ParseFailureKind::kUnknownLabel, "label " + q.labels.token(pos) + " not shown",
                     PreferenceRanking(order));
    }
    if (!seen.insert(pos).second) {
      return failure(ParseFailureKind::kDuplicateLabel,
                     "label " + q.labels.token(pos) + " repeated", PreferenceRanking(order));
    }
    order.push_back(q.label_map[pos]);
  }
  if (order.size() < expected_n) {
    return failure(ParseFailureKind::kMissingLabels,
                   std::to_string(order.size()) + " of " + std::to_string(expected_n) + " labels",
                   PreferenceRanking(order));
  }
  if (order.size() > expected_n) {
    return failure(ParseFailureKind::kAmbiguous, "more labels than expected",
                   PreferenceRanking(order));
  }
  return AnswerValue{RankingAnswer{PreferenceRanking(std::move(order))}};
}

ParseOutcome parse_scores(std::string_view text, const LabeledQuestion& q,
                          std::string_view marker) {
  const auto region = answer_region(text, marker);
  std::map<OptionIndex, double> scores;
  std::set<std::size_t> seen;
  std::size_t pos = 0;
  while (pos <= region.size()) {
    const auto nl = region.find('\n', pos);
    const auto line = trim(region.substr(pos, nl == std::string_view::npos ? region.npos : nl - pos));
    pos = nl == std::string_view::npos ? region.size() + 1 : nl + 1;

    const auto colon = line.find(':');
    if (line.empty() || colon == std::string_view::npos) continue;
    const auto label = trim(line.substr(0, colon));
    const auto scheme_pos = q.labels.index_of(label);
    if (!scheme_pos) continue;
    if (*scheme_pos >= q.label_map.size()) {
      return failure(ParseFailureKind::kUnknownLabel, "label " + std::string(label) + " not shown");
    }
    if (!seen.insert(*scheme_pos).second) {
      return failure(ParseFailureKind::kDuplicateLabel, "label " + std::string(label) + " scored twice");
    }
    const auto value = parse_number(line.substr(colon + 1));
    if (!value) {
      return failure(ParseFailureKind::kAmbiguous,
                     "score for " + std::string(label) + " is not a number");
    }
    scores[q.label_map[*scheme_pos]] = *value;
  }
  if (scores.empty()) return failure(ParseFailureKind::kNoAnswerFound, "no scored label");
  if (scores.size() < q.label_map.size()) {
    return failure(ParseFailureKind::kMissingLabels,
                   std::to_string(scores.size()) + " of " + std::to_string(q.label_map.size()) +
                       " options scored",
                   scores_to_ranking(scores));
  }
  std::size_t ties = 0;
  scores_to_ranking(scores, &ties);
  ParseOutcome out(AnswerValue{ScoresAnswer{std::move(scores)}});
  out.ties = ties;
  return out;
}

ParseOutcome parse_pair_choice(std::string_view text, const LabeledQuestion& q,
                               std::string_view marker) {
  if (q.label_map.size() != 2) throw std::invalid_argument("pair parse needs a two-option view");
  ParseOutcome sel = parse_selection(text, q, marker);
  if (!sel.ok()) return sel;
  const OptionIndex chosen = std::get<SelectionAnswer>(sel.value()).option;
  return AnswerValue{
      PairAnswer{chosen == q.label_map[0] ? Preference::kFirst : Preference::kSecond}};
}

PreferenceRanking scores_to_ranking(const std::map<OptionIndex, double>& scores,
                                    std::size_t* ties) {
  std::vector<std::pair<OptionIndex, double>> items(scores.begin(), scores.end());
  // Map iteration is index-ascending, so a stable sort keeps the tie-break.
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<OptionIndex> order;
  order.reserve(items.size());
  std::size_t tie_count = 0;
  for (std::size_t k = 0; k < items.size(); ++k) {
    order.push_back(items[k].first);
    if (k > 0 && items[k].second == items[k - 1].second) ++tie_count;
  }
  if (ties) *ties = tie_count;
  return PreferenceRanking(std::move(order));
}

ParseOutcome parse_answer(std::string_view text, const TaskInstance& task,
                          std::string_view marker) {
  switch (task.format) {
    case TaskFormat::kSingleSelect:
      return parse_selection(text, task.display, marker);
    case TaskFormat::kOrdinalRanking:
      return parse_ranking(text, task.display, task.display.label_map.size(), marker);
    case TaskFormat::kCardinalRanking:
      return parse_scores(text, task.display, marker);
    case TaskFormat::kBinaryComparison:
      return parse_pair_choice(text, task.display, marker);
  }
  throw std::logic_error("unhandled task format");
}

}  // namespace prefcon
