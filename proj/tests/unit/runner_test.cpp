#include "prefcon/runner.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <mutex>
#include <random>
#include <set>

#include "prefcon/dataset.hpp"
#include "prefcon/pipeline.hpp"
#include "prefcon/report.hpp"
#include "prefcon/synthetic_oracle.hpp"
#include "prefcon/templates.hpp"
#include "support/fixtures.hpp"

namespace prefcon {
namespace {

using testing::ScratchDir;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ExperimentConfig small_config(const ScratchDir& dir, Experiment e, const std::string& oracle) {
  testing::write_benchmark(dir / "data", 3, 4);
  ExperimentConfig c = ExperimentConfig::from_json(
      {{"experiment", to_string(e)},
       {"test_path", "data/test.jsonl"},
       {"dev_path", "data/dev.jsonl"},
       {"oracle", oracle},
       {"seed", 11},
       {"output_dir", "out"},
       {"retry_delay_ms", 1}},
      dir.path());
  return c;
}

// Fails the first `failures` calls for every task, then delegates.
class FlakyOracle final : public Oracle {
 public:
  FlakyOracle(OracleDescriptor d, int failures, OracleErrorKind kind)
      : inner_(std::move(d)), failures_(failures), kind_(kind) {}
  std::string answer(const OracleRequest& r) const override {
    {
      std::lock_guard lock(mutex_);
      ++calls_;
      if (attempts_[r.task_key]++ < failures_) throw OracleError(kind_, "injected");
    }
    return inner_.answer(r);
  }
  const OracleDescriptor& descriptor() const override { return inner_.descriptor(); }
  bool keyed_by_task() const override { return true; }
  int calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
  }

 private:
  SyntheticOracle inner_;
  int failures_;
  OracleErrorKind kind_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, int> attempts_;
  mutable int calls_ = 0;
};

TEST(Config, FromJsonResolvesAndValidates) {
  ScratchDir dir("cfg");
  const auto c = small_config(dir, Experiment::kIia, "random");
  EXPECT_EQ(c.test_path, dir / "data/test.jsonl");
  EXPECT_EQ(c.oracle.seed, 11u);
  EXPECT_EQ(c.retry_initial_delay, std::chrono::milliseconds(1));
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(ExperimentConfig::from_json(c.to_json()).run_digest(), c.run_digest());

  const auto own_seed = ExperimentConfig::from_json(
      {{"experiment", "iia"}, {"test_path", "t"}, {"oracle", "random:seed=3"}, {"seed", 11}});
  EXPECT_EQ(own_seed.oracle.seed, 3u);
  EXPECT_THROW(ExperimentConfig::from_json({{"experiment", "iia"}, {"test_path", "t"}, {"colour", 1}}), std::invalid_argument);
  EXPECT_THROW(parse_experiment("telepathy"), std::invalid_argument);

  auto bad = c;
  bad.option_count = 2;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = c;
  bad.dev_path.clear();
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad.few_shot_k = 0;
  EXPECT_NO_THROW(bad.validate());
  bad = c;
  bad.test_path = dir / "nope.jsonl";
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Config, DigestTracksResultFieldsOnly) {
  ScratchDir dir("digest");
  const auto c = small_config(dir, Experiment::kIia, "random");
  auto other = c;
  other.output_dir = "elsewhere";
  other.concurrency = 17;
  EXPECT_EQ(other.run_digest(), c.run_digest());
  other = c;
  other.seed = 12;
  EXPECT_NE(other.run_digest(), c.run_digest());
  other = c;
  other.template_version = 2;
  EXPECT_NE(other.run_digest(), c.run_digest());
}

TEST(Plan, TaskCountsPerQuestion) {
  auto q = Question{"q", "s", "stem", {"a", "b", "c", "d"}, 1};
  const TaskBuilder builder(nullptr, 0);
  const std::map<Experiment, std::size_t> expected{{Experiment::kLabelBias, 3},
                                                   {Experiment::kFormatSensitivity, 3},
                                                   {Experiment::kAsymmetryTransitivity, 12},
                                                   {Experiment::kIia, 6},
                                                   {Experiment::kReversibility, 2}};
  for (const auto& [e, n] : expected) {
    const auto plan = plan_experiment(e, {q, Question{"r", "s", "stem", {"a", "b", "c", "d"}, 0}},
                                      builder, LabelSet::alphabetic(), 0);
    EXPECT_EQ(plan.tasks.size(), 2 * n) << to_string(e);
    std::set<std::string> keys;
    for (const auto& t : plan.tasks) {
      EXPECT_NO_THROW(t.validate());
      keys.insert(t.key);
    }
    EXPECT_EQ(keys.size(), plan.tasks.size());
  }
  EXPECT_THROW(plan_experiment(Experiment::kIia, {q, q}, builder, LabelSet::alphabetic(), 0),
               std::invalid_argument);
}

TEST(Cache, RoundTripAndDamagedEntriesMiss) {
  ScratchDir dir("cache");
  const ResponseCache cache(dir / "c");
  const std::string key(64, 'a');
  EXPECT_FALSE(cache.get(key));
  cache.put(key, "Answer: B\n");
  EXPECT_EQ(cache.get(key), "Answer: B\n");
  const auto file = dir / "c" / "aa" / (key + ".json");
  ASSERT_TRUE(std::filesystem::exists(file));
  std::ofstream(file, std::ios::trunc) << "{\"key\":";
  EXPECT_FALSE(cache.get(key));
}

TEST(Cache, KeyCoversPromptOracleDecodeAndTemplate) {
  const SyntheticOracle a(OracleDescriptor::parse("random:seed=1"));
  const SyntheticOracle b(OracleDescriptor::parse("random:seed=2"));
  const DecodeParams d;
  const auto base = cache_key("p", a, d, "default@1", "k");
  EXPECT_EQ(base.size(), 64u);
  EXPECT_EQ(cache_key("p", a, d, "default@1", "k"), base);
  EXPECT_NE(cache_key("q", a, d, "default@1", "k"), base);
  EXPECT_NE(cache_key("p", b, d, "default@1", "k"), base);
  EXPECT_NE(cache_key("p", a, DecodeParams{0.5, 256}, "default@1", "k"), base);
  EXPECT_NE(cache_key("p", a, d, "default@2", "k"), base);
  EXPECT_NE(cache_key("p", a, d, "default@1", "other"), base);
}

RunRecord record(std::string key, std::optional<std::string> response) {
  RunRecord r;
  r.task_key = std::move(key);
  r.question_id = "q";
  r.subject = "s";
  r.response = std::move(response);
  if (!r.response) {
    r.error_kind = "server_error";
    r.error_message = "boom";
  }
  return r;
}

TEST(RecordStore, AppendLoadAndTornTail) {
  ScratchDir dir("store");
  RunRecord full = record("q|a", "Answer: A");
  full.answer = RankingAnswer{{2, 0, 1}};
  full.failure = ParseFailure{ParseFailureKind::kMissingLabels, "x", PreferenceRanking{2}};
  full.pair = std::pair<OptionIndex, OptionIndex>{0, 2};
  {
    RecordStore store(dir / "r.jsonl");
    store.append(full);
    store.append(record("q|b", std::nullopt));
  }
  std::ofstream(dir / "r.jsonl", std::ios::app) << "{\"task_key\": \"q|c\", \"resp";
  const auto loaded = RecordStore(dir / "r.jsonl").load();
  ASSERT_EQ(loaded.size(), 2u);
  EXPECT_EQ(loaded[0], full);
  EXPECT_FALSE(loaded[1].succeeded());
  EXPECT_EQ(loaded[1].error_kind, "server_error");

  std::ofstream(dir / "mid.jsonl") << "garbage\n" << full.to_json().dump() << "\n";
  EXPECT_THROW(RecordStore(dir / "mid.jsonl").load(), std::runtime_error);
  EXPECT_TRUE(RecordStore(dir / "absent.jsonl").load().empty());
}

TEST(RecordStore, LatestPrefersSuccess) {
  const auto latest = latest_records({record("b", std::nullopt), record("a", "first"),
                                      record("b", "ok"), record("a", "second"),
                                      record("b", std::nullopt), record("c", std::nullopt)});
  ASSERT_EQ(latest.size(), 3u);
  EXPECT_EQ(latest[0].response, "second");
  EXPECT_EQ(latest[1].response, "ok");
  EXPECT_FALSE(latest[2].succeeded());
}

TEST(Retry, ExponentialAndCapped) {
  RetryPolicy p;
  p.initial_delay = std::chrono::milliseconds(100);
  p.max_delay = std::chrono::milliseconds(350);
  EXPECT_EQ(p.delay_for(0).count(), 100);
  EXPECT_EQ(p.delay_for(1).count(), 200);
  EXPECT_EQ(p.delay_for(2).count(), 350);
}

TEST(Execute, RetriesTransientFailures) {
  ScratchDir dir("flaky");
  const auto c = small_config(dir, Experiment::kReversibility, "total_order");
  const FlakyOracle oracle(c.oracle, 2, OracleErrorKind::kServerError);
  const auto outcome = run_experiment(c, oracle);
  EXPECT_EQ(outcome.stats.tasks, 24u);
  EXPECT_EQ(outcome.stats.retries, 48u);
  EXPECT_EQ(outcome.stats.failures, 0u);
  EXPECT_EQ(oracle.calls(), 72);
  EXPECT_EQ(outcome.report.cell("sim").value, 1.0);
}

TEST(Execute, PermanentFailuresAreRecordedThenRetriedOnRerun) {
  ScratchDir dir("failing");
  auto c = small_config(dir, Experiment::kIia, "total_order");
  const FlakyOracle broken(c.oracle, 1000, OracleErrorKind::kClientError);
  const auto first = run_experiment(c, broken);
  EXPECT_EQ(first.stats.failures, 72u);
  EXPECT_EQ(first.stats.retries, 0u);
  EXPECT_EQ(first.report.coverage.oracle_failures.at("client_error"), 72u);
  EXPECT_FALSE(first.report.cell("sim.gold").value);

  const FlakyOracle healthy(c.oracle, 0, OracleErrorKind::kClientError);
  const auto second = run_experiment(c, healthy);
  EXPECT_EQ(healthy.calls(), 72);
  EXPECT_EQ(second.stats.appended, 72u);
  EXPECT_EQ(second.report.coverage.parsed, 72u);
  EXPECT_TRUE(second.report.coverage.oracle_failures.empty());
  EXPECT_EQ(second.report.cell("sim.gold").value, 1.0);
}

TEST(Execute, ResumeMatchesUninterruptedRun) {
  ScratchDir dir("resume");
  auto c = small_config(dir, Experiment::kAsymmetryTransitivity, "random");
  const auto partial = run_experiment(c, RunOptions{10});
  EXPECT_EQ(partial.stats.oracle_calls, 10u);
  EXPECT_EQ(partial.stats.not_run, 134u);
  const auto resumed = run_experiment(c);
  EXPECT_EQ(resumed.stats.cache_hits, 10u);
  EXPECT_EQ(resumed.stats.oracle_calls, 134u);
  EXPECT_EQ(resumed.stats.already_recorded, 10u);
  EXPECT_EQ(RecordStore(resumed.paths.records).load().size(), 144u);

  ScratchDir clean("resume-clean");
  auto d = small_config(clean, Experiment::kAsymmetryTransitivity, "random");
  const auto straight = run_experiment(d);
  EXPECT_EQ(straight.report, resumed.report);
  EXPECT_EQ(report_to_csv(straight.report), report_to_csv(resumed.report));
  EXPECT_EQ(slurp(straight.paths.report_markdown), slurp(resumed.paths.report_markdown));

  const auto again = run_experiment(c);
  EXPECT_EQ(again.stats.cache_hits, 144u);
  EXPECT_EQ(again.stats.oracle_calls, 0u);
  EXPECT_EQ(again.stats.appended, 0u);
  EXPECT_EQ(slurp(again.paths.report_json), slurp(resumed.paths.report_json));
}

TEST(Execute, TemplateVersionMissesTheCache) {
  ScratchDir dir("tplver");
  auto c = small_config(dir, Experiment::kReversibility, "total_order");
  c.cache_dir = dir / "shared-cache";
  EXPECT_EQ(run_experiment(c).stats.oracle_calls, 24u);

  std::string text(default_template_text());
  text.replace(text.find("version = 1"), 11, "version = 2");
  std::ofstream(dir / "v2.tpl") << text;
  c.template_path = dir / "v2.tpl";
  c.template_version = 2;
  const auto v2 = run_experiment(c);
  EXPECT_EQ(v2.stats.cache_hits, 0u);
  EXPECT_EQ(v2.stats.oracle_calls, 24u);
  EXPECT_EQ(v2.report.template_id, "default@2");
}

TEST(Execute, ConcurrencyDoesNotChangeResults) {
  ScratchDir a("conc1");
  ScratchDir b("conc8");
  auto c1 = small_config(a, Experiment::kLabelBias, "positional_bias:p=0.5");
  auto c8 = small_config(b, Experiment::kLabelBias, "positional_bias:p=0.5");
  c1.concurrency = 1;
  c8.concurrency = 8;
  EXPECT_EQ(run_experiment(c1).report, run_experiment(c8).report);
}

RunRecord ranking_record(const std::string& subject, const std::string& qid, const std::string& role,
                         std::optional<PreferenceRanking> ranking) {
  RunRecord r = record(qid + "|" + role, "text");
  r.subject = subject;
  r.question_id = qid;
  r.role = role;
  r.option_count = 4;
  r.gold = 0;
  if (ranking) {
    r.answer = RankingAnswer{*ranking};
  } else {
    r.failure = ParseFailure{ParseFailureKind::kDuplicateLabel, "A twice", std::nullopt};
  }
  return r;
}

std::vector<RunRecord> reversibility_records() {
  return {
      ranking_record("a", "q1", "rev:descending", PreferenceRanking{0, 1, 2, 3}),
      ranking_record("a", "q1", "rev:ascending", PreferenceRanking{3, 2, 1, 0}),
      ranking_record("a", "q2", "rev:descending", PreferenceRanking{0, 1, 2, 3}),
      ranking_record("a", "q2", "rev:ascending", PreferenceRanking{0, 1, 2, 3}),
      ranking_record("b", "q3", "rev:descending", PreferenceRanking{1, 0, 2, 3}),
      ranking_record("b", "q3", "rev:ascending", PreferenceRanking{2, 3, 0, 1}),
      ranking_record("b", "q4", "rev:descending", PreferenceRanking{0, 1, 2, 3}),
      ranking_record("b", "q4", "rev:ascending", std::nullopt),
  };
}

TEST(Aggregate, MacroAverageByHand) {
  const auto report = aggregate(Experiment::kReversibility, reversibility_records());
  EXPECT_EQ(report.subjects, (std::vector<std::string>{"a", "b"}));
  // a: q1 perfect, q2 fully reversed (distance 4 of 8). b: q3 agrees on two.
  EXPECT_DOUBLE_EQ(*report.by_subject.at("a")[0].value, 0.5);
  EXPECT_DOUBLE_EQ(*report.by_subject.at("a")[3].value, 0.75);
  EXPECT_DOUBLE_EQ(*report.by_subject.at("b")[1].value, 1.0);
  EXPECT_DOUBLE_EQ(*report.by_subject.at("b")[2].value, 0.0);
  EXPECT_DOUBLE_EQ(*report.cell("match@1").value, 0.75);
  EXPECT_DOUBLE_EQ(*report.cell("match@2").value, 0.75);
  EXPECT_DOUBLE_EQ(*report.cell("match@3").value, 0.25);
  EXPECT_DOUBLE_EQ(*report.cell("sim").value, 0.75);
  EXPECT_EQ(report.cell("sim").count, 3u);
  EXPECT_EQ(report.cell("sim").total, 4u);
  EXPECT_EQ(report.coverage.tasks, 8u);
  EXPECT_EQ(report.coverage.parsed, 7u);
  EXPECT_EQ(report.coverage.irreflexivity_violations, 1u);
}

TEST(Aggregate, IndependentOfRecordOrder) {
  auto records = reversibility_records();
  const auto expected = aggregate(Experiment::kReversibility, records);
  const auto md = report_to_markdown(expected);
  std::mt19937 rng(5);
  for (int t = 0; t < 20; ++t) {
    std::shuffle(records.begin(), records.end(), rng);
    const auto report = aggregate(Experiment::kReversibility, records);
    EXPECT_EQ(report, expected);
    EXPECT_EQ(report_to_markdown(report), md);
  }
}

TEST(Aggregate, EmptyInputIsAnError) {
  EXPECT_THROW(aggregate(Experiment::kIia, {}), std::invalid_argument);
  ScratchDir dir("empty");
  const auto c = small_config(dir, Experiment::kIia, "random");
  EXPECT_THROW(write_reports(c), std::runtime_error);
}

TEST(Aggregate, QuestionMetricsForPairs) {
  // A 3-cycle on options 0..2 asked in both orders, option 3 never asked.
  std::vector<RunRecord> records;
  const auto add = [&](OptionIndex i, OptionIndex j, Preference p) {
    RunRecord r = record("q|pair:" + std::to_string(i) + "," + std::to_string(j), "t");
    r.option_count = 4;
    r.pair = std::pair{i, j};
    r.answer = PairAnswer{p};
    records.push_back(r);
  };
  add(0, 1, Preference::kFirst);
  add(1, 0, Preference::kSecond);
  add(1, 2, Preference::kFirst);
  add(2, 1, Preference::kSecond);
  add(2, 0, Preference::kFirst);
  add(0, 2, Preference::kFirst);  // contradicts (2, 0)
  std::vector<const RunRecord*> ptrs;
  for (const auto& r : records) ptrs.push_back(&r);
  const auto m = question_metrics(Experiment::kAsymmetryTransitivity, ptrs);
  EXPECT_DOUBLE_EQ(*m.at("asymmetry"), 2.0 / 3.0);
  // Upper triangle gives 0>1, 1>2, 0>2, which is acyclic. The lower triangle
  // gives 0>1, 1>2, 2>0, a cycle through every resolved pair.
  EXPECT_DOUBLE_EQ(*m.at("transitivity.upper"), 1.0);
  EXPECT_DOUBLE_EQ(*m.at("transitivity.lower"), 0.0);
  EXPECT_DOUBLE_EQ(*m.at("transitivity.avg"), 0.5);
}

TEST(Answers, JsonRoundTrip) {
  for (const AnswerValue& v :
       {AnswerValue{SelectionAnswer{2}}, AnswerValue{RankingAnswer{{3, 1, 0, 2}}},
        AnswerValue{ScoresAnswer{{{0, 1.5}, {1, -2.0}}}}, AnswerValue{PairAnswer{Preference::kSecond}}}) {
    EXPECT_EQ(answer_from_json(answer_to_json(v)), v);
  }
}

}  // namespace
}  // namespace prefcon
