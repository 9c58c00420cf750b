#include <benchmark/benchmark.h>

#include <filesystem>

#include "prefcon/parsing.hpp"
#include "prefcon/runner.hpp"
#include "prefcon/synthetic_oracle.hpp"
#include "prefcon/templates.hpp"

namespace {

using namespace prefcon;

std::vector<Question> questions(std::size_t count) {
  std::vector<Question> qs;
  for (std::size_t k = 0; k < count; ++k) {
    qs.push_back(Question{"q" + std::to_string(k), "s" + std::to_string(k % 10), "stem",
                          {"alpha", "beta", "gamma", "delta"}, k % 4});
  }
  return qs;
}

void BM_PlanAsymmetry(benchmark::State& state) {
  const auto qs = questions(static_cast<std::size_t>(state.range(0)));
  const TaskBuilder builder(nullptr, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        plan_experiment(Experiment::kAsymmetryTransitivity, qs, builder, LabelSet::alphabetic(), 1));
  }
}
BENCHMARK(BM_PlanAsymmetry)->Arg(100)->Arg(1000);

void BM_AnswerAndParse(benchmark::State& state) {
  const auto qs = questions(50);
  const TaskBuilder builder(nullptr, 0);
  const auto plan = plan_experiment(Experiment::kIia, qs, builder, LabelSet::alphabetic(), 1);
  const SyntheticOracle oracle(OracleDescriptor::parse("random:seed=1"));
  for (auto _ : state) {
    for (const auto& t : plan.tasks) {
      const auto text = oracle.answer(OracleRequest{"", {}, t.key, "", &t});
      benchmark::DoNotOptimize(parse_answer(text, t));
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(plan.tasks.size()));
}
BENCHMARK(BM_AnswerAndParse);

void BM_ExecuteCached(benchmark::State& state) {
  const auto dir = std::filesystem::temp_directory_path() / "prefcon-bench-execute";
  std::filesystem::remove_all(dir);
  const auto qs = questions(20);
  const TaskBuilder builder(nullptr, 0);
  const auto plan = plan_experiment(Experiment::kAsymmetryTransitivity, qs, builder,
                                    LabelSet::alphabetic(), 1);
  const SyntheticOracle oracle(OracleDescriptor::parse("random:seed=1"));
  const PromptTemplate tmpl = TemplateRegistry().get("default", 1);
  ResponseCache cache(dir / "cache");
  RecordStore store(dir / "records.jsonl");
  ExecuteOptions options;
  options.concurrency = static_cast<std::size_t>(state.range(0));
  execute_plan(plan, oracle, tmpl, cache, store, options);  // warm the cache
  for (auto _ : state) benchmark::DoNotOptimize(execute_plan(plan, oracle, tmpl, cache, store, options));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(plan.tasks.size()));
  std::filesystem::remove_all(dir);
}
BENCHMARK(BM_ExecuteCached)->Arg(1)->Arg(4)->UseRealTime();

}  // namespace
