#include "prefcon/similarity.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace prefcon {

PreferenceRanking::PreferenceRanking(std::vector<OptionIndex> items) : items_(std::move(items)) {
  std::vector<OptionIndex> sorted = items_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("preference ranking repeats an option");
  }
}

bool PreferenceRanking::valid_for(std::size_t option_count) const {
  return std::all_of(items_.begin(), items_.end(),
                     [&](OptionIndex id) { return id < option_count; });
}

bool PreferenceRanking::contains(OptionIndex id) const {
  return position_of(id) != items_.size();
}

std::size_t PreferenceRanking::position_of(OptionIndex id) const {
  return static_cast<std::size_t>(std::find(items_.begin(), items_.end(), id) - items_.begin());
}

PreferenceRanking PreferenceRanking::reversed() const {
  return PreferenceRanking(std::vector<OptionIndex>(items_.rbegin(), items_.rend()));
}

PreferenceRanking PreferenceRanking::without(OptionIndex id) const {
  std::vector<OptionIndex> kept;
  kept.reserve(items_.size());
  std::copy_if(items_.begin(), items_.end(), std::back_inserter(kept),
               [&](OptionIndex x) { return x != id; });
  return PreferenceRanking(std::move(kept));
}

std::size_t min_edit_distance(std::span<const OptionIndex> a, std::span<const OptionIndex> b) {
  // Two-row Wagner-Fischer.
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> curr(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    curr[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t substitute = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      curr[j] = std::min({prev[j] + 1, curr[j - 1] + 1, substitute});
    }
    std::swap(prev, curr);
  }
  return prev[b.size()];
}

double normalized_similarity(std::span<const OptionIndex> reference,
                             std::span<const OptionIndex> candidate) {
  if (reference.empty()) {
    throw std::invalid_argument("normalized similarity needs a non-empty reference");
  }
  const double med = static_cast<double>(min_edit_distance(reference, candidate));
  const double sim = 1.0 - med / (2.0 * static_cast<double>(reference.size()));
  return std::max(0.0, sim);
}

std::size_t prefix_match_length(std::span<const OptionIndex> a, std::span<const OptionIndex> b) {
  const auto [ia, ib] = std::mismatch(a.begin(), a.end(), b.begin(), b.end());
  return static_cast<std::size_t>(ia - a.begin());
}

bool hit_rate(std::span<const OptionIndex> ranking, OptionIndex gold, std::size_t n) {
  if (n == 0) throw std::invalid_argument("HitRate@N needs N >= 1");
  const auto head = ranking.first(std::min(n, ranking.size()));
  return std::find(head.begin(), head.end(), gold) != head.end();
}

}  // namespace prefcon
