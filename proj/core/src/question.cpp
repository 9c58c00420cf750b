#include "prefcon/question.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <stdexcept>

namespace prefcon {
namespace {

constexpr std::size_t kSchemeSize = 26;

std::string to_roman(std::size_t value) {
  static constexpr std::array<std::pair<std::size_t, const char*>, 13> kDigits{{
      {1000, "M"}, {900, "CM"}, {500, "D"}, {400, "CD"}, {100, "C"}, {90, "XC"}, {50, "L"},
      {40, "XL"}, {10, "X"}, {9, "IX"}, {5, "V"}, {4, "IV"}, {1, "I"},
  }};
  std::string out;
  for (const auto& [weight, digits] : kDigits) {
    while (value >= weight) {
      out += digits;
      value -= weight;
    }
  }
  return out;
}

}  // namespace

void Question::validate() const {
  if (options.size() < 2) {
    throw std::invalid_argument("question '" + id + "' has fewer than 2 options");
  }
  if (gold && *gold >= options.size()) {
    throw std::invalid_argument("question '" + id + "' has gold index out of range");
  }
}

LabelSet::LabelSet(LabelScheme scheme, std::vector<std::string> tokens)
    : scheme_(scheme), tokens_(std::move(tokens)) {
  if (tokens_.empty()) throw std::invalid_argument("label set is empty");
  std::set<std::string_view> seen;
  for (const auto& t : tokens_) {
    if (t.empty() || std::any_of(t.begin(), t.end(), [](unsigned char c) {
          return std::isspace(c) || c == ',' || c == '>' || c == ':';
        })) {
      throw std::invalid_argument("label token '" + t + "' is empty or contains a separator");
    }
    if (!seen.insert(t).second) throw std::invalid_argument("duplicate label token '" + t + "'");
  }
}

LabelSet LabelSet::alphabetic() {
  std::vector<std::string> tokens;
  for (std::size_t k = 0; k < kSchemeSize; ++k) tokens.emplace_back(1, static_cast<char>('A' + k));
  return LabelSet(LabelScheme::kAlphabetic, std::move(tokens));
}

LabelSet LabelSet::arabic() {
  std::vector<std::string> tokens;
  for (std::size_t k = 1; k <= kSchemeSize; ++k) tokens.push_back("(" + std::to_string(k) + ")");
  return LabelSet(LabelScheme::kArabic, std::move(tokens));
}

LabelSet LabelSet::roman() {
  std::vector<std::string> tokens;
  for (std::size_t k = 1; k <= kSchemeSize; ++k) tokens.push_back(to_roman(k));
  return LabelSet(LabelScheme::kRoman, std::move(tokens));
}

LabelSet LabelSet::custom(std::vector<std::string> tokens) {
  return LabelSet(LabelScheme::kCustom, std::move(tokens));
}

LabelSet LabelSet::by_name(std::string_view name) {
  if (name == "alphabetic") return alphabetic();
  if (name == "arabic") return arabic();
  if (name == "roman") return roman();
  throw std::invalid_argument("unknown label set '" + std::string(name) + "'");
}

std::string_view LabelSet::name() const { return to_string(scheme_); }

std::optional<std::size_t> LabelSet::index_of(std::string_view token) const {
  const auto it = std::find(tokens_.begin(), tokens_.end(), token);
  if (it == tokens_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - tokens_.begin());
}

std::string_view to_string(LabelScheme scheme) {
  switch (scheme) {
    case LabelScheme::kAlphabetic: return "alphabetic";
    case LabelScheme::kArabic: return "arabic";
    case LabelScheme::kRoman: return "roman";
    case LabelScheme::kCustom: return "custom";
  }
  return "custom";
}

}  // namespace prefcon
