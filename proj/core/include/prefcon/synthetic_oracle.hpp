#pragma once

#include "prefcon/oracle.hpp"

namespace prefcon {

/// Ground-truth oracles that read the structured task instead of the prompt.
///
/// total_order      answers every task from one fixed per-question order:
///                  gold first, then canonical index order.
/// positional_bias  as total_order, but each answer independently moves the
///                  first-listed option to the top with probability bias_p.
///                  The draw for a task is the same for every bias_p, so
///                  metrics are monotone in bias_p task by task.
/// random           answers each task from a fresh uniform permutation
///                  seeded by (seed, task key).
class SyntheticOracle final : public Oracle {
 public:
  /// Throws std::invalid_argument for the remote kind.
  explicit SyntheticOracle(OracleDescriptor descriptor);

  std::string answer(const OracleRequest& request) const override;
  const OracleDescriptor& descriptor() const override { return descriptor_; }
  bool keyed_by_task() const override { return true; }

  /// Answer as a typed value, before rendering to text.
  AnswerValue answer_value(const TaskInstance& task) const;

 private:
  OracleDescriptor descriptor_;
};

/// The per-question order a synthetic oracle holds. For the random kind this
/// is a uniform permutation seeded by (seed, question id). Throws
/// std::invalid_argument for the remote kind.
PreferenceRanking hidden_order(const OracleDescriptor& descriptor, const Question& question);

}  // namespace prefcon
