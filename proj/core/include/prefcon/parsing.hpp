#pragma once

// Raw oracle text -> typed answers.
//
// Only the answer region is read: the text after the LAST occurrence of the
// answer marker (or the whole text when the marker is absent). Selection,
// ranking and pair answers are read from the first non-empty line of that
// region; score answers from all of it. A label is recognised only as a
// standalone token, i.e. not flanked by letters or digits.

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "prefcon/protocol.hpp"

namespace prefcon {

enum class ParseFailureKind {
  kDuplicateLabel,  ///< a ranking repeats a label (irreflexivity violation)
  kUnknownLabel,    ///< a label of the scheme that is not displayed
  kMissingLabels,   ///< fewer distinct labels than options
  kNoAnswerFound,
  kAmbiguous,       ///< malformed or conflicting content
};

std::string_view to_string(ParseFailureKind kind);
ParseFailureKind parse_failure_kind(std::string_view name);

struct ParseFailure {
  ParseFailureKind kind;
  std::string detail;
  /// Labels read before the failure, as original identities (ranking only).
  std::optional<PreferenceRanking> partial;
};

class ParseOutcome {
 public:
  ParseOutcome(AnswerValue value) : state_(std::move(value)) {}  // NOLINT(implicit)
  ParseOutcome(ParseFailure failure) : state_(std::move(failure)) {}  // NOLINT(implicit)

  bool ok() const { return std::holds_alternative<AnswerValue>(state_); }
  const AnswerValue& value() const { return std::get<AnswerValue>(state_); }
  const ParseFailure& failure() const { return std::get<ParseFailure>(state_); }

  /// Score answers whose ranking needed the index tie-break.
  std::size_t ties = 0;

 private:
  std::variant<AnswerValue, ParseFailure> state_;
};

inline constexpr std::string_view kDefaultAnswerMarker = "Answer:";

/// Text after the last marker, or all of `text`.
std::string_view answer_region(std::string_view text, std::string_view marker);

ParseOutcome parse_selection(std::string_view text, const LabeledQuestion& q,
                             std::string_view marker = kDefaultAnswerMarker);

ParseOutcome parse_ranking(std::string_view text, const LabeledQuestion& q,
                           std::size_t expected_n,
                           std::string_view marker = kDefaultAnswerMarker);

ParseOutcome parse_scores(std::string_view text, const LabeledQuestion& q,
                          std::string_view marker = kDefaultAnswerMarker);

/// Reads a selection from a two-option view and reports it relative to the
/// displayed order.
ParseOutcome parse_pair_choice(std::string_view text, const LabeledQuestion& q,
                               std::string_view marker = kDefaultAnswerMarker);

/// Sort by descending score, ties by ascending canonical index. `ties`, if
/// given, receives the number of adjacent equal-score pairs.
PreferenceRanking scores_to_ranking(const std::map<OptionIndex, double>& scores,
                                    std::size_t* ties = nullptr);

/// Dispatches on the task format.
ParseOutcome parse_answer(std::string_view text, const TaskInstance& task,
                          std::string_view marker = kDefaultAnswerMarker);

}  // namespace prefcon
