#include "prefcon/synthetic_oracle.hpp"

#include <algorithm>
#include <numeric>

#include "prefcon/random.hpp"

namespace prefcon {
namespace {

PreferenceRanking gold_first_order(const Question& q) {
  std::vector<OptionIndex> order(q.option_count());
  std::iota(order.begin(), order.end(), OptionIndex{0});
  if (q.gold) {
    std::stable_partition(order.begin(), order.end(), [&](OptionIndex x) { return x == *q.gold; });
  }
  return PreferenceRanking(std::move(order));
}

}  // namespace

PreferenceRanking hidden_order(const OracleDescriptor& descriptor, const Question& question) {
  switch (descriptor.kind) {
    case OracleKind::kTotalOrder:
    case OracleKind::kPositionalBias:
      return gold_first_order(question);
    case OracleKind::kRandom: {
      SeededRng rng(descriptor.seed, "order|" + question.id);
      return PreferenceRanking(rng.permutation(question.option_count()));
    }
    case OracleKind::kRemote:
      break;
  }
  throw std::invalid_argument("remote oracles have no hidden order");
}

SyntheticOracle::SyntheticOracle(OracleDescriptor descriptor) : descriptor_(std::move(descriptor)) {
  if (descriptor_.kind == OracleKind::kRemote) {
    throw std::invalid_argument("SyntheticOracle cannot serve the remote kind");
  }
  descriptor_.validate();
}

AnswerValue SyntheticOracle::answer_value(const TaskInstance& task) const {
  const Question& original = *task.original;
  const auto& shown = task.display.label_map;

  PreferenceRanking base;
  if (descriptor_.kind == OracleKind::kRandom) {
    SeededRng rng(descriptor_.seed, "answer|" + task.key);
    base = PreferenceRanking(rng.permutation(original.option_count()));
  } else {
    base = hidden_order(descriptor_, original);
  }

  std::vector<OptionIndex> preferred;
  for (OptionIndex id : base.items()) {
    if (std::find(shown.begin(), shown.end(), id) != shown.end()) preferred.push_back(id);
  }

  if (descriptor_.kind == OracleKind::kPositionalBias && !shown.empty()) {
    SeededRng rng(descriptor_.seed, "bias|" + task.key);
    if (rng.unit() < descriptor_.bias_p) {
      const auto first_listed = std::find(preferred.begin(), preferred.end(), shown.front());
      std::rotate(preferred.begin(), first_listed, first_listed + 1);
    }
  }

  switch (task.format) {
    case TaskFormat::kSingleSelect:
      return SelectionAnswer{preferred.front()};
    case TaskFormat::kBinaryComparison:
      return PairAnswer{preferred.front() == shown.front() ? Preference::kFirst
                                                           : Preference::kSecond};
    case TaskFormat::kOrdinalRanking:
      if (task.direction == Direction::kAscending) std::reverse(preferred.begin(), preferred.end());
      return RankingAnswer{PreferenceRanking(std::move(preferred))};
    case TaskFormat::kCardinalRanking: {
      ScoresAnswer scores;
      for (std::size_t k = 0; k < preferred.size(); ++k) {
        scores.scores[preferred[k]] = static_cast<double>(preferred.size() - k);
      }
      return scores;
    }
  }
  throw std::logic_error("unhandled task format");
}

std::string SyntheticOracle::answer(const OracleRequest& request) const {
  if (request.task == nullptr) {
    throw OracleError(OracleErrorKind::kConfiguration,
                      "synthetic oracle needs the structured task with the request");
  }
  const TaskInstance& task = *request.task;
  return "Answer: " + render_answer_text(task.display, task.format, answer_value(task));
}

}  // namespace prefcon
