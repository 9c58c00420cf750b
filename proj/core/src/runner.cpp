#include "prefcon/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "prefcon/digest.hpp"

namespace prefcon {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json failure_to_json(const ParseFailure& f) {
  json j{{"kind", to_string(f.kind)}, {"detail", f.detail}};
  if (f.partial) j["partial"] = f.partial->items();
  return j;
}

ParseFailure failure_from_json(const json& j) {
  ParseFailure f{parse_failure_kind(j.at("kind").get<std::string>()),
                 j.at("detail").get<std::string>(), std::nullopt};
  if (j.contains("partial")) {
    f.partial = PreferenceRanking(j.at("partial").get<std::vector<OptionIndex>>());
  }
  return f;
}

template <class T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <class T>
std::optional<T> get_optional(const json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

Plan plan_experiment(Experiment experiment, const std::vector<Question>& questions,
                     const TaskBuilder& builder, const LabelSet& labels, std::uint64_t seed) {
  Plan plan;
  plan.experiment = experiment;
  for (const auto& question : questions) {
    auto q = std::make_shared<const Question>(question);
    auto& tasks = plan.tasks;
    switch (experiment) {
      case Experiment::kLabelBias:
        for (const auto& set : {LabelSet::alphabetic(), LabelSet::arabic(), LabelSet::roman()}) {
          tasks.push_back(builder.make_task(q, TaskFormat::kOrdinalRanking, Direction::kDescending,
                                            set, "labels:" + std::string(set.name())));
        }
        break;
      case Experiment::kFormatSensitivity:
        for (auto format : {TaskFormat::kSingleSelect, TaskFormat::kOrdinalRanking,
                            TaskFormat::kCardinalRanking}) {
          tasks.push_back(builder.make_task(q, format, Direction::kDescending, labels,
                                            "format:" + std::string(to_string(format))));
        }
        break;
      case Experiment::kAsymmetryTransitivity: {
        auto pairs = builder.enumerate_ordered_pairs(q, labels);
        std::move(pairs.begin(), pairs.end(), std::back_inserter(tasks));
        break;
      }
      case Experiment::kIia:
        tasks.push_back(builder.make_task(q, TaskFormat::kOrdinalRanking, Direction::kDescending,
                                          labels, "iia:full"));
        for (auto policy : kAllRemovalPolicies) {
          tasks.push_back(builder.make_iia_task(q, policy, seed, labels));
        }
        break;
      case Experiment::kReversibility:
        for (auto direction : {Direction::kDescending, Direction::kAscending}) {
          tasks.push_back(builder.make_task(q, TaskFormat::kOrdinalRanking, direction, labels,
                                            "rev:" + std::string(to_string(direction))));
        }
        break;
    }
  }
  std::set<std::string_view> keys;
  for (const auto& t : plan.tasks) {
    if (!keys.insert(t.key).second) {
      throw std::invalid_argument("duplicate task key '" + t.key + "' (question ids must be unique)");
    }
  }
  return plan;
}

Plan plan_experiment(const ExperimentConfig& config, const Dataset& dataset) {
  const TaskBuilder builder(config.few_shot_k > 0 ? &dataset.dev : nullptr, config.few_shot_k);
  return plan_experiment(config.experiment, dataset.questions, builder,
                         LabelSet::by_name(config.labels), config.seed);
}

json answer_to_json(const AnswerValue& value) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, SelectionAnswer>) {
          return {{"type", "selection"}, {"option", v.option}};
        } else if constexpr (std::is_same_v<T, RankingAnswer>) {
          return {{"type", "ranking"}, {"ranking", v.ranking.items()}};
        } else if constexpr (std::is_same_v<T, ScoresAnswer>) {
          json scores = json::array();
          for (const auto& [option, score] : v.scores) scores.push_back({option, score});
          return {{"type", "scores"}, {"scores", scores}};
        } else {
          return {{"type", "pair"}, {"choice", static_cast<int>(v.choice)}};
        }
      },
      value);
}

AnswerValue answer_from_json(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "selection") return SelectionAnswer{j.at("option").get<OptionIndex>()};
  if (type == "ranking") {
    return RankingAnswer{PreferenceRanking(j.at("ranking").get<std::vector<OptionIndex>>())};
  }
  if (type == "scores") {
    ScoresAnswer s;
    for (const auto& item : j.at("scores")) {
      s.scores.emplace(item.at(0).get<OptionIndex>(), item.at(1).get<double>());
    }
    return s;
  }
  if (type == "pair") {
    const int c = j.at("choice").get<int>();
    if (c != 1 && c != -1) throw std::invalid_argument("pair choice must be 1 or -1");
    return PairAnswer{static_cast<Preference>(c)};
  }
  throw std::invalid_argument("unknown answer type '" + type + "'");
}

json RunRecord::to_json() const {
  json j{{"task_key", task_key},       {"question_id", question_id},
         {"subject", subject},         {"role", role},
         {"format", to_string(format)}, {"direction", to_string(direction)},
         {"labels", labels},           {"label_map", label_map},
         {"option_count", option_count}, {"template", template_id},
         {"oracle", oracle},           {"cache_key", cache_key},
         {"ties", ties}};
  put_optional(j, "gold", gold);
  if (pair) j["pair"] = {pair->first, pair->second};
  put_optional(j, "removed", removed);
  put_optional(j, "response", response);
  if (error_kind) j["error"] = {{"kind", *error_kind}, {"message", error_message.value_or("")}};
  if (answer) j["answer"] = answer_to_json(*answer);
  if (failure) j["parse_failure"] = failure_to_json(*failure);
  return j;
}

RunRecord RunRecord::from_json(const json& j) {
  RunRecord r;
  r.task_key = j.at("task_key").get<std::string>();
  r.question_id = j.at("question_id").get<std::string>();
  r.subject = j.at("subject").get<std::string>();
  r.role = j.at("role").get<std::string>();
  r.format = parse_task_format(j.at("format").get<std::string>());
  r.direction = parse_direction(j.at("direction").get<std::string>());
  r.labels = j.at("labels").get<std::string>();
  r.label_map = j.at("label_map").get<std::vector<OptionIndex>>();
  r.option_count = j.at("option_count").get<std::size_t>();
  r.template_id = j.at("template").get<std::string>();
  r.oracle = j.at("oracle").get<std::string>();
  r.cache_key = j.at("cache_key").get<std::string>();
  r.ties = j.value("ties", std::size_t{0});
  r.gold = get_optional<OptionIndex>(j, "gold");
  if (j.contains("pair")) {
    r.pair = std::pair{j.at("pair").at(0).get<OptionIndex>(), j.at("pair").at(1).get<OptionIndex>()};
  }
  r.removed = get_optional<OptionIndex>(j, "removed");
  r.response = get_optional<std::string>(j, "response");
  if (j.contains("error")) {
    r.error_kind = j.at("error").at("kind").get<std::string>();
    r.error_message = j.at("error").value("message", std::string{});
  }
  if (j.contains("answer")) r.answer = answer_from_json(j.at("answer"));
  if (j.contains("parse_failure")) r.failure = failure_from_json(j.at("parse_failure"));
  return r;
}

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
}

fs::path ResponseCache::path_for(const std::string& key) const {
  if (key.size() < 3) throw std::invalid_argument("cache key too short");
  return dir_ / key.substr(0, 2) / (key + ".json");
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
  std::ifstream in(path_for(key));
  if (!in) return std::nullopt;
  const auto j = json::parse(in, nullptr, false);
  // A damaged entry is treated as a miss and rewritten.
  if (j.is_discarded() || !j.is_object() || !j.contains("response") ||
      j.value("key", std::string{}) != key) {
    return std::nullopt;
  }
  return j.at("response").get<std::string>();
}

void ResponseCache::put(const std::string& key, const std::string& response,
                        const json& meta) const {
  static std::atomic<std::uint64_t> counter{0};
  const fs::path final_path = path_for(key);
  fs::create_directories(final_path.parent_path());
  json j = meta;
  j["key"] = key;
  j["response"] = response;

  std::ostringstream suffix;
  suffix << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << "."
         << counter.fetch_add(1);
  const fs::path tmp = final_path.string() + suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write cache entry " + tmp.string());
    out << j.dump() << '\n';
    out.flush();
    if (!out) throw std::runtime_error("short write to cache entry " + tmp.string());
  }
  fs::rename(tmp, final_path);
}

std::string cache_key(const std::string& prompt, const Oracle& oracle, const DecodeParams& decode,
                      const std::string& template_id, const std::string& task_key) {
  json j{{"prompt", prompt},
         {"oracle", oracle.descriptor().canonical()},
         {"temperature", decode.temperature},
         {"max_tokens", decode.max_tokens},
         {"template", template_id}};
  if (oracle.keyed_by_task()) j["task"] = task_key;
  return sha256_hex(j.dump());
}

RecordStore::RecordStore(fs::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
}

std::vector<RunRecord> RecordStore::load() const {
  std::vector<RunRecord> out;
  std::ifstream in(path_);
  if (!in) return out;
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(std::move(line));
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto j = json::parse(lines[i], nullptr, false);
    if (j.is_discarded()) {
      if (i + 1 == lines.size()) break;  // torn tail from an interrupted append
      throw std::runtime_error(path_.string() + ": record " + std::to_string(i + 1) +
                               " is not valid JSON");
    }
    out.push_back(RunRecord::from_json(j));
  }
  return out;
}

void RecordStore::append(const RunRecord& record) {
  const std::string line = record.to_json().dump() + "\n";
  std::lock_guard lock(mutex_);
  if (!out_.is_open()) {
    out_.open(path_, std::ios::binary | std::ios::app);
    if (!out_) throw std::runtime_error("cannot open record store " + path_.string());
  }
  out_ << line;
  out_.flush();
  if (!out_) throw std::runtime_error("write to record store " + path_.string() + " failed");
}

std::vector<RunRecord> latest_records(const std::vector<RunRecord>& records) {
  std::map<std::string, const RunRecord*> latest;
  for (const auto& r : records) {
    auto [it, inserted] = latest.try_emplace(r.task_key, &r);
    if (!inserted && (r.succeeded() || !it->second->succeeded())) it->second = &r;
  }
  std::vector<RunRecord> out;
  out.reserve(latest.size());
  for (const auto& [key, r] : latest) out.push_back(*r);
  return out;
}

std::chrono::milliseconds RetryPolicy::delay_for(std::size_t attempt) const {
  const double scaled =
      static_cast<double>(initial_delay.count()) * std::pow(multiplier, static_cast<double>(attempt));
  const double capped = std::min(scaled, static_cast<double>(max_delay.count()));
  return std::chrono::milliseconds(static_cast<long>(capped));
}

double ExecutionStats::cache_hit_rate() const {
  return tasks == 0 ? 0.0 : static_cast<double>(cache_hits) / static_cast<double>(tasks);
}

json ExecutionStats::to_json() const {
  return {{"tasks", tasks},
          {"cache_hits", cache_hits},
          {"cache_hit_rate", cache_hit_rate()},
          {"oracle_calls", oracle_calls},
          {"retries", retries},
          {"failures", failures},
          {"appended", appended},
          {"already_recorded", already_recorded},
          {"not_run", not_run},
          {"parse_failures", parse_failures}};
}

ExecutionStats execute_plan(const Plan& plan, const Oracle& oracle, const PromptTemplate& tmpl,
                            ResponseCache& cache, RecordStore& store,
                            const ExecuteOptions& options) {
  std::set<std::string> recorded;
  for (const auto& r : store.load()) {
    if (r.succeeded()) recorded.insert(r.task_key);
  }

  const std::string template_id = tmpl.id();
  const std::string oracle_name = oracle.descriptor().canonical();
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> calls_started{0};
  std::mutex stats_mutex;
  ExecutionStats stats;
  stats.tasks = plan.tasks.size();

  const auto run_one = [&](const TaskInstance& task) {
    const std::string prompt = build_prompt(task, tmpl);
    const std::string key = cache_key(prompt, oracle, options.decode, template_id, task.key);

    RunRecord rec;
    rec.task_key = task.key;
    rec.question_id = task.original->id;
    rec.subject = task.original->subject;
    rec.role = task.role;
    rec.format = task.format;
    rec.direction = task.direction;
    rec.labels = std::string(task.display.labels.name());
    rec.label_map = task.display.label_map;
    rec.option_count = task.original->option_count();
    rec.gold = task.original->gold;
    rec.pair = task.pair;
    rec.removed = task.removed;
    rec.template_id = template_id;
    rec.oracle = oracle_name;
    rec.cache_key = key;

    std::size_t retries = 0;
    bool hit = false;
    bool called = false;
    if (auto cached = cache.get(key)) {
      rec.response = std::move(*cached);
      hit = true;
    } else {
      if (options.call_limit && calls_started.fetch_add(1) >= *options.call_limit) {
        std::lock_guard lock(stats_mutex);
        ++stats.not_run;
        return;
      }
      called = true;
      const OracleRequest request{prompt, options.decode, task.key, template_id, &task};
      for (std::size_t attempt = 0;; ++attempt) {
        try {
          rec.response = oracle.answer(request);
          // Persist the raw text before any parsing.
          cache.put(key, *rec.response,
                    {{"task_key", task.key}, {"template", template_id}, {"oracle", oracle_name}});
          break;
        } catch (const OracleError& e) {
          if (e.retryable() && attempt < options.retry.max_retries) {
            ++retries;
            std::this_thread::sleep_for(options.retry.delay_for(attempt));
            continue;
          }
          rec.error_kind = std::string(to_string(e.kind()));
          rec.error_message = e.what();
          break;
        }
      }
    }

    if (rec.response) {
      ParseOutcome outcome = parse_answer(*rec.response, task, tmpl.answer_marker());
      if (outcome.ok()) {
        rec.answer = outcome.value();
      } else {
        rec.failure = outcome.failure();
      }
      rec.ties = outcome.ties;
    }

    const bool skip_append = rec.succeeded() && recorded.contains(task.key);
    if (!skip_append) store.append(rec);

    std::lock_guard lock(stats_mutex);
    stats.cache_hits += hit ? 1 : 0;
    stats.oracle_calls += called ? 1 : 0;
    stats.retries += retries;
    stats.failures += rec.succeeded() ? 0 : 1;
    stats.parse_failures += rec.failure ? 1 : 0;
    if (skip_append) {
      ++stats.already_recorded;
    } else {
      ++stats.appended;
    }
  };

  std::exception_ptr first_error;
  std::mutex error_mutex;
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= plan.tasks.size()) return;
      try {
        run_one(plan.tasks[i]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(plan.tasks.size());
        return;
      }
    }
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(options.concurrency, plan.tasks.size()));
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);
  return stats;
}

RunPaths run_paths(const ExperimentConfig& config) {
  const std::string d = config.run_digest().substr(0, 16);
  const fs::path& out = config.output_dir;
  return RunPaths{out / ("records-" + d + ".jsonl"), out / ("report-" + d + ".json"),
                  out / ("report-" + d + ".csv"), out / ("report-" + d + ".md"),
                  out / ("run-summary-" + d + ".json")};
}

PromptTemplate resolve_template(const ExperimentConfig& config) {
  TemplateRegistry registry;
  if (!config.template_path.empty()) registry.add(PromptTemplate::load(config.template_path));
  return registry.get(config.template_name, config.template_version);
}

}  // namespace prefcon
