#include "prefcon/protocol.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "prefcon/random.hpp"

namespace prefcon {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string format_score(double v) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

std::size_t display_position(const LabeledQuestion& q, OptionIndex original) {
  const auto it = std::find(q.label_map.begin(), q.label_map.end(), original);
  if (it == q.label_map.end()) {
    throw std::invalid_argument("option " + std::to_string(original) + " is not displayed");
  }
  return static_cast<std::size_t>(it - q.label_map.begin());
}

/// Gold first, remaining displayed options in canonical order.
std::vector<OptionIndex> exemplar_order(const LabeledQuestion& q) {
  std::vector<OptionIndex> order = q.label_map;
  std::sort(order.begin(), order.end());
  if (q.view.gold) {
    const OptionIndex gold = q.label_map.at(*q.view.gold);
    std::stable_partition(order.begin(), order.end(), [&](OptionIndex x) { return x == gold; });
  }
  return order;
}

/// Two-option view of `q` showing `first` then `second`.
LabeledQuestion pair_view(const Question& q, OptionIndex first, OptionIndex second,
                          const LabelSet& labels) {
  LabeledQuestion out{Question{q.id, q.subject, q.stem, {q.options.at(first), q.options.at(second)},
                               std::nullopt},
                      labels,
                      {first, second}};
  if (q.gold == first) out.view.gold = 0;
  if (q.gold == second) out.view.gold = 1;
  if (labels.size() < 2) throw std::invalid_argument("label set has fewer than 2 tokens");
  return out;
}

}  // namespace

std::string_view to_string(TaskFormat format) {
  switch (format) {
    case TaskFormat::kSingleSelect: return "single_select";
    case TaskFormat::kOrdinalRanking: return "ordinal_ranking";
    case TaskFormat::kCardinalRanking: return "cardinal_ranking";
    case TaskFormat::kBinaryComparison: return "binary_comparison";
  }
  return "ordinal_ranking";
}

std::string_view to_string(Direction direction) {
  return direction == Direction::kDescending ? "descending" : "ascending";
}

TaskFormat parse_task_format(std::string_view name) {
  for (auto f : {TaskFormat::kSingleSelect, TaskFormat::kOrdinalRanking,
                 TaskFormat::kCardinalRanking, TaskFormat::kBinaryComparison}) {
    if (to_string(f) == name) return f;
  }
  throw std::invalid_argument("unknown task format '" + std::string(name) + "'");
}

Direction parse_direction(std::string_view name) {
  if (name == "descending") return Direction::kDescending;
  if (name == "ascending") return Direction::kAscending;
  throw std::invalid_argument("unknown direction '" + std::string(name) + "'");
}

std::string_view to_string(RemovalPolicy policy) {
  switch (policy) {
    case RemovalPolicy::kGold: return "gold";
    case RemovalPolicy::kGoldPlus1: return "gold_plus_1";
    case RemovalPolicy::kGoldPlus2: return "gold_plus_2";
    case RemovalPolicy::kGoldPlus3: return "gold_plus_3";
    case RemovalPolicy::kRandomNonGold: return "random_non_gold";
  }
  return "gold";
}

RemovalPolicy parse_removal_policy(std::string_view name) {
  for (auto p : kAllRemovalPolicies) {
    if (to_string(p) == name) return p;
  }
  throw std::invalid_argument("unknown removal policy '" + std::string(name) + "'");
}

LabeledQuestion relabel(const Question& q, const LabelSet& labels) {
  if (labels.size() < q.option_count()) {
    throw std::invalid_argument("label set '" + std::string(labels.name()) + "' has " +
                                std::to_string(labels.size()) + " tokens for " +
                                std::to_string(q.option_count()) + " options");
  }
  LabeledQuestion out{q, labels, std::vector<OptionIndex>(q.option_count())};
  std::iota(out.label_map.begin(), out.label_map.end(), OptionIndex{0});
  return out;
}

void TaskInstance::validate() const {
  if (!original) throw std::invalid_argument("task '" + key + "' has no original question");
  const std::size_t shown = display.view.option_count();
  if (display.label_map.size() != shown) {
    throw std::invalid_argument("task '" + key + "' label map does not cover the view");
  }
  if (display.labels.size() < shown) {
    throw std::invalid_argument("task '" + key + "' has too few labels");
  }
  std::vector<OptionIndex> ids = display.label_map;
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end() ||
      (!ids.empty() && ids.back() >= original->option_count())) {
    throw std::invalid_argument("task '" + key + "' label map is not injective into the original");
  }
  if (pair.has_value() != (format == TaskFormat::kBinaryComparison)) {
    throw std::invalid_argument("task '" + key + "' pair must be present iff binary comparison");
  }
  if (direction != Direction::kDescending && format != TaskFormat::kOrdinalRanking) {
    throw std::invalid_argument("task '" + key + "' only ordinal ranking may ascend");
  }
}

IiaVariant make_iia_variant(const Question& q, RemovalPolicy removal, std::uint64_t seed) {
  const std::size_t n = q.option_count();
  if (n < 3) throw std::invalid_argument("option removal needs at least 3 options");
  if (!q.gold) throw std::invalid_argument("option removal is defined relative to gold");
  const OptionIndex gold = *q.gold;

  IiaVariant out;
  switch (removal) {
    case RemovalPolicy::kGold: out.removed = gold; break;
    case RemovalPolicy::kGoldPlus1: out.removed = (gold + 1) % n; break;
    case RemovalPolicy::kGoldPlus2: out.removed = (gold + 2) % n; break;
    case RemovalPolicy::kGoldPlus3: out.removed = (gold + 3) % n; break;
    case RemovalPolicy::kRandomNonGold: {
      SeededRng rng(seed, "iia-random-non-gold|" + q.id);
      const auto pick = static_cast<OptionIndex>(rng.below(n - 1));
      out.removed = pick < gold ? pick : pick + 1;
      break;
    }
  }
  out.gold_removed = out.removed == gold;

  out.reduced = Question{q.id, q.subject, q.stem, {}, std::nullopt};
  for (OptionIndex k = 0; k < n; ++k) {
    if (k == out.removed) continue;
    if (k == gold) out.reduced.gold = out.reduced.options.size();
    out.reduced.options.push_back(q.options[k]);
    out.identity_map.push_back(k);
  }
  return out;
}

AnswerValue exemplar_answer(const LabeledQuestion& q, TaskFormat format, Direction direction) {
  switch (format) {
    case TaskFormat::kSingleSelect:
      if (!q.view.gold) throw std::invalid_argument("exemplar needs a gold option");
      return SelectionAnswer{q.label_map.at(*q.view.gold)};
    case TaskFormat::kBinaryComparison: {
      if (q.label_map.size() != 2) throw std::invalid_argument("binary exemplar needs two options");
      // Gold wins; otherwise the lower canonical index does.
      const OptionIndex winner = exemplar_order(q).front();
      return PairAnswer{winner == q.label_map[0] ? Preference::kFirst : Preference::kSecond};
    }
    case TaskFormat::kOrdinalRanking: {
      auto order = exemplar_order(q);
      if (direction == Direction::kAscending) std::reverse(order.begin(), order.end());
      return RankingAnswer{PreferenceRanking(std::move(order))};
    }
    case TaskFormat::kCardinalRanking: {
      const auto order = exemplar_order(q);
      ScoresAnswer scores;
      for (std::size_t k = 0; k < order.size(); ++k) {
        scores.scores[order[k]] = static_cast<double>(order.size() - k);
      }
      return scores;
    }
  }
  throw std::logic_error("unhandled task format");
}

std::string render_answer_text(const LabeledQuestion& q, TaskFormat format,
                               const AnswerValue& value) {
  const auto label_of = [&](OptionIndex original) -> const std::string& {
    return q.labels.token(display_position(q, original));
  };
  const bool matches = std::visit(
      Overloaded{
          [&](const SelectionAnswer&) { return format == TaskFormat::kSingleSelect; },
          [&](const RankingAnswer&) { return format == TaskFormat::kOrdinalRanking; },
          [&](const ScoresAnswer&) { return format == TaskFormat::kCardinalRanking; },
          [&](const PairAnswer&) { return format == TaskFormat::kBinaryComparison; },
      },
      value);
  if (!matches) {
    throw std::invalid_argument("answer value does not match format " +
                                std::string(to_string(format)));
  }
  return std::visit(
      Overloaded{
          [&](const SelectionAnswer& a) { return label_of(a.option); },
          [&](const RankingAnswer& a) {
            std::string out;
            for (std::size_t k = 0; k < a.ranking.size(); ++k) {
              if (k > 0) out += ", ";
              out += label_of(a.ranking[k]);
            }
            return out;
          },
          [&](const ScoresAnswer& a) {
            // One line per option, in display order.
            std::ostringstream out;
            bool first = true;
            for (OptionIndex id : q.label_map) {
              const auto it = a.scores.find(id);
              if (it == a.scores.end()) continue;
              if (!first) out << '\n';
              first = false;
              out << label_of(id) << ": " << format_score(it->second);
            }
            return out.str();
          },
          [&](const PairAnswer& a) {
            if (q.label_map.size() != 2 || a.choice == Preference::kUnresolved) {
              throw std::invalid_argument("pair answer needs a two-option view and a choice");
            }
            return q.labels.token(a.choice == Preference::kFirst ? 0 : 1);
          },
      },
      value);
}

TaskBuilder::TaskBuilder(const DevSet* dev, std::size_t k) : dev_(dev), k_(k) {
  if (k_ > 0 && dev_ == nullptr) {
    throw std::invalid_argument("few-shot prompting needs a development set");
  }
}

std::vector<SolvedExample> TaskBuilder::assemble_few_shot(std::string_view subject,
                                                          TaskFormat format,
                                                          const LabelSet& labels,
                                                          Direction direction) const {
  std::vector<SolvedExample> out;
  if (k_ == 0) return out;
  const auto it = dev_->find(subject);
  const std::size_t available = it == dev_->end() ? 0 : it->second.size();
  if (available < k_) {
    throw std::invalid_argument("development set has " + std::to_string(available) +
                                " examples for subject '" + std::string(subject) + "', need " +
                                std::to_string(k_));
  }
  for (std::size_t e = 0; e < k_; ++e) {
    const Question& dev_q = it->second[e];
    if (!dev_q.gold) {
      throw std::invalid_argument("development example '" + dev_q.id + "' has no gold option");
    }
    LabeledQuestion shown;
    if (format == TaskFormat::kBinaryComparison) {
      const OptionIndex gold = *dev_q.gold;
      std::vector<OptionIndex> others;
      for (OptionIndex k = 0; k < dev_q.option_count(); ++k) {
        if (k != gold) others.push_back(k);
      }
      const OptionIndex other = others[e % others.size()];
      shown = e % 2 == 0 ? pair_view(dev_q, gold, other, labels)
                         : pair_view(dev_q, other, gold, labels);
    } else {
      shown = relabel(dev_q, labels);
    }
    std::string answer = render_answer_text(shown, format, exemplar_answer(shown, format, direction));
    out.push_back(SolvedExample{std::move(shown), std::move(answer)});
  }
  return out;
}

TaskInstance TaskBuilder::make_task(std::shared_ptr<const Question> q, TaskFormat format,
                                    Direction direction, const LabelSet& labels,
                                    std::string role) const {
  TaskInstance t;
  t.key = q->id + "|" + role;
  t.role = std::move(role);
  t.display = relabel(*q, labels);
  t.format = format;
  t.direction = direction;
  t.few_shot = assemble_few_shot(q->subject, format, labels, direction);
  t.original = std::move(q);
  t.validate();
  return t;
}

std::vector<TaskInstance> TaskBuilder::enumerate_ordered_pairs(std::shared_ptr<const Question> q,
                                                               const LabelSet& labels) const {
  const std::size_t n = q->option_count();
  if (n < 2) throw std::invalid_argument("ordered pairs need at least 2 options");
  const auto examples =
      assemble_few_shot(q->subject, TaskFormat::kBinaryComparison, labels, Direction::kDescending);
  std::vector<TaskInstance> out;
  out.reserve(n * (n - 1));
  for (OptionIndex i = 0; i < n; ++i) {
    for (OptionIndex j = 0; j < n; ++j) {
      if (i == j) continue;
      TaskInstance t;
      t.role = "pair:" + std::to_string(i) + "," + std::to_string(j);
      t.key = q->id + "|" + t.role;
      t.original = q;
      t.display = pair_view(*q, i, j, labels);
      t.format = TaskFormat::kBinaryComparison;
      t.pair = std::pair{i, j};
      t.few_shot = examples;
      t.validate();
      out.push_back(std::move(t));
    }
  }
  return out;
}

TaskInstance TaskBuilder::make_iia_task(std::shared_ptr<const Question> q, RemovalPolicy removal,
                                        std::uint64_t seed, const LabelSet& labels) const {
  IiaVariant variant = make_iia_variant(*q, removal, seed);
  TaskInstance t;
  t.role = "iia:" + std::string(to_string(removal));
  t.key = q->id + "|" + t.role;
  t.display = relabel(variant.reduced, labels);
  t.display.label_map = std::move(variant.identity_map);
  t.removed = variant.removed;
  t.format = TaskFormat::kOrdinalRanking;
  t.direction = Direction::kDescending;
  t.few_shot = assemble_few_shot(q->subject, t.format, labels, t.direction);
  t.original = std::move(q);
  t.validate();
  return t;
}

}  // namespace prefcon
