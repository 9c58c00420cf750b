#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prefcon/similarity.hpp"

namespace prefcon {

/// One multiple-choice item. The canonical identity of an option is its
/// position in `options`.
struct Question {
  std::string id;
  std::string subject;
  std::string stem;
  std::vector<std::string> options;
  /// Empty only for derived views whose gold option was removed.
  std::optional<OptionIndex> gold;

  std::size_t option_count() const { return options.size(); }

  /// Throws std::invalid_argument when fewer than two options are present or
  /// gold is out of range.
  void validate() const;

  bool operator==(const Question&) const = default;
};

/// Solved development examples per subject, in file order.
using DevSet = std::map<std::string, std::vector<Question>, std::less<>>;

enum class LabelScheme { kAlphabetic, kArabic, kRoman, kCustom };

/// Ordered label tokens shown in front of options. A scheme may define more
/// tokens than a question uses; tokens past the option count are still
/// recognised when parsing, so they can be reported as unknown labels.
class LabelSet {
 public:
  /// A, B, C, ... Z
  static LabelSet alphabetic();
  /// (1), (2), ... (26)
  static LabelSet arabic();
  /// I, II, III, IV, ... XXVI
  static LabelSet roman();
  /// Throws std::invalid_argument on empty, duplicate or whitespace-bearing
  /// tokens.
  static LabelSet custom(std::vector<std::string> tokens);
  /// "alphabetic", "arabic" or "roman".
  static LabelSet by_name(std::string_view name);

  LabelScheme scheme() const { return scheme_; }
  std::string_view name() const;
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  const std::string& token(std::size_t position) const { return tokens_.at(position); }
  std::optional<std::size_t> index_of(std::string_view token) const;

  bool operator==(const LabelSet&) const = default;

 private:
  LabelSet(LabelScheme scheme, std::vector<std::string> tokens);

  LabelScheme scheme_;
  std::vector<std::string> tokens_;
};

std::string_view to_string(LabelScheme scheme);

}  // namespace prefcon
