#pragma once

// Construction of every query variant: label remapping, question formats,
// ordered pairs, option removal, ranking direction and few-shot examples.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "prefcon/order.hpp"
#include "prefcon/question.hpp"
#include "prefcon/similarity.hpp"

namespace prefcon {

enum class TaskFormat { kSingleSelect, kOrdinalRanking, kCardinalRanking, kBinaryComparison };
enum class Direction { kDescending, kAscending };

std::string_view to_string(TaskFormat format);
std::string_view to_string(Direction direction);
TaskFormat parse_task_format(std::string_view name);
Direction parse_direction(std::string_view name);

// Typed answer values. Every identity is canonical, i.e. it indexes the
// options of the ORIGINAL question.
struct SelectionAnswer {
  OptionIndex option;
  bool operator==(const SelectionAnswer&) const = default;
};
struct RankingAnswer {
  PreferenceRanking ranking;
  bool operator==(const RankingAnswer&) const = default;
};
struct ScoresAnswer {
  std::map<OptionIndex, double> scores;
  bool operator==(const ScoresAnswer&) const = default;
};
struct PairAnswer {
  Preference choice;  ///< kFirst or kSecond, relative to the displayed pair
  bool operator==(const PairAnswer&) const = default;
};
using AnswerValue = std::variant<SelectionAnswer, RankingAnswer, ScoresAnswer, PairAnswer>;

/// A question as displayed: options in display order, the labels shown in
/// front of them, and where each displayed option came from.
struct LabeledQuestion {
  Question view;
  LabelSet labels = LabelSet::alphabetic();
  /// label_map[p] is the original identity of the option displayed at
  /// position p (and labelled labels.token(p)).
  std::vector<OptionIndex> label_map;
};

/// Displays `q` under `labels` without reordering. Throws
/// std::invalid_argument when the label set is too small.
LabeledQuestion relabel(const Question& q, const LabelSet& labels);

/// A solved example shown before the target question.
struct SolvedExample {
  LabeledQuestion question;
  std::string answer_text;
};

struct TaskInstance {
  std::string key;   ///< unique within a plan, "<question id>|<role>"
  std::string role;  ///< experiment-specific variant tag
  std::shared_ptr<const Question> original;
  LabeledQuestion display;
  TaskFormat format = TaskFormat::kOrdinalRanking;
  Direction direction = Direction::kDescending;
  /// Original identities of the ordered pair; binary comparison only.
  std::optional<std::pair<OptionIndex, OptionIndex>> pair;
  /// Original identity of the option removed from the view, if any.
  std::optional<OptionIndex> removed;
  std::vector<SolvedExample> few_shot;

  /// Throws std::invalid_argument when an invariant does not hold.
  void validate() const;
};

enum class RemovalPolicy { kGold, kGoldPlus1, kGoldPlus2, kGoldPlus3, kRandomNonGold };

inline constexpr RemovalPolicy kAllRemovalPolicies[] = {
    RemovalPolicy::kGold, RemovalPolicy::kGoldPlus1, RemovalPolicy::kGoldPlus2,
    RemovalPolicy::kGoldPlus3, RemovalPolicy::kRandomNonGold};

std::string_view to_string(RemovalPolicy policy);
RemovalPolicy parse_removal_policy(std::string_view name);

struct IiaVariant {
  Question reduced;
  /// identity_map[p] is the original identity of reduced option p.
  std::vector<OptionIndex> identity_map;
  OptionIndex removed = 0;
  /// Set when the gold option itself was removed; `reduced.gold` is empty.
  bool gold_removed = false;
};

/// Removes one option. gold+k wraps modulo the option count. The random
/// policy draws uniformly among non-gold options, seeded by (seed, id).
/// Throws std::invalid_argument for fewer than three options or a question
/// without gold.
IiaVariant make_iia_variant(const Question& q, RemovalPolicy removal, std::uint64_t seed);

/// The correct answer a solved example shows: gold first and the rest in
/// canonical order (reversed for ascending), gold alone for single select,
/// descending scores for cardinal ranking, and for a binary pair the option
/// that comes first in that order.
AnswerValue exemplar_answer(const LabeledQuestion& q, TaskFormat format, Direction direction);

/// Renders `value` in the answer syntax of `format`, without the answer
/// marker. Throws std::invalid_argument if the value references an option
/// that is not displayed.
std::string render_answer_text(const LabeledQuestion& q, TaskFormat format,
                               const AnswerValue& value);

/// Builds task instances with few-shot examples drawn from a development set.
class TaskBuilder {
 public:
  /// `dev` may be null when `k` is zero.
  TaskBuilder(const DevSet* dev, std::size_t k);

  std::size_t shots() const { return k_; }

  /// k solved examples for `subject` in file order, rendered in the target's
  /// format, labels and direction. Binary examples alternate the gold
  /// option's position. Throws std::invalid_argument naming the subject if
  /// the development set has fewer than k examples.
  std::vector<SolvedExample> assemble_few_shot(std::string_view subject, TaskFormat format,
                                               const LabelSet& labels,
                                               Direction direction) const;

  TaskInstance make_task(std::shared_ptr<const Question> q, TaskFormat format,
                         Direction direction, const LabelSet& labels, std::string role) const;

  /// n(n-1) binary tasks, one per ordered pair (i, j), i != j, row-major.
  std::vector<TaskInstance> enumerate_ordered_pairs(std::shared_ptr<const Question> q,
                                                    const LabelSet& labels) const;

  /// Descending ordinal ranking task over the reduced question.
  TaskInstance make_iia_task(std::shared_ptr<const Question> q, RemovalPolicy removal,
                             std::uint64_t seed, const LabelSet& labels) const;

 private:
  const DevSet* dev_;
  std::size_t k_;
};

}  // namespace prefcon
