#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace prefcon {

/// Canonical identity of an option: its position in the original question.
using OptionIndex = std::size_t;

/// An ordered sequence of distinct option identities, most preferred first
/// unless the producing task said otherwise.
class PreferenceRanking {
 public:
  PreferenceRanking() = default;
  /// Throws std::invalid_argument if `items` repeats an identity.
  explicit PreferenceRanking(std::vector<OptionIndex> items);
  PreferenceRanking(std::initializer_list<OptionIndex> items)
      : PreferenceRanking(std::vector<OptionIndex>(items)) {}

  const std::vector<OptionIndex>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  OptionIndex operator[](std::size_t k) const { return items_[k]; }

  /// True when every identity is below `option_count`.
  bool valid_for(std::size_t option_count) const;
  bool contains(OptionIndex id) const;
  /// Position of `id`, or size() when absent.
  std::size_t position_of(OptionIndex id) const;

  PreferenceRanking reversed() const;
  /// Copy with `id` dropped; unchanged if absent.
  PreferenceRanking without(OptionIndex id) const;

  operator std::span<const OptionIndex>() const { return items_; }

  bool operator==(const PreferenceRanking&) const = default;

 private:
  std::vector<OptionIndex> items_;
};

/// Levenshtein distance with unit insert, delete and substitute costs.
std::size_t min_edit_distance(std::span<const OptionIndex> a, std::span<const OptionIndex> b);

/// max(0, 1 - MED / (2n)) with n the length of `reference`.
/// Throws std::invalid_argument for an empty reference.
double normalized_similarity(std::span<const OptionIndex> reference,
                             std::span<const OptionIndex> candidate);

/// Length of the longest common prefix.
std::size_t prefix_match_length(std::span<const OptionIndex> a, std::span<const OptionIndex> b);

/// True iff `gold` is among the first min(n, size) items. Throws
/// std::invalid_argument for n == 0.
bool hit_rate(std::span<const OptionIndex> ranking, OptionIndex gold, std::size_t n);

}  // namespace prefcon
