#include "prefcon/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace prefcon {
namespace {

namespace fs = std::filesystem;

struct RawRecord {
  Question question;
  fs::path file;
  std::size_t line = 0;
  bool has_id = false;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open dataset file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string subject_from_stem(const fs::path& file) {
  std::string stem = file.stem().string();
  for (std::string_view suffix : {"_test", "_dev", "_val"}) {
    if (stem.size() > suffix.size() && stem.ends_with(suffix)) {
      stem.resize(stem.size() - suffix.size());
      break;
    }
  }
  return stem;
}

std::size_t parse_answer(const std::string& raw, std::size_t option_count, const fs::path& file,
                         std::size_t line) {
  std::string s = raw;
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (s.size() == 1 && s[0] >= 'A' && s[0] <= 'Z') {
    const auto idx = static_cast<std::size_t>(s[0] - 'A');
    if (idx < option_count) return idx;
  } else if (!s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; })) {
    const auto idx = static_cast<std::size_t>(std::stoul(s));
    if (idx < option_count) return idx;
  }
  throw DatasetError(file, line, "answer '" + raw + "' is not a valid option");
}

void read_csv_file(const fs::path& file, const LoadOptions& options, std::vector<RawRecord>& out) {
  const std::string subject = subject_from_stem(file);
  for (auto& rec : read_csv(read_file(file), file)) {
    auto& f = rec.fields;
    if (f.size() == 1 && f[0].empty()) continue;  // blank line
    // question, options..., answer [, subject]
    const bool with_subject = f.size() == options.option_count + 3;
    const bool without_subject = f.size() == options.option_count + 2;
    if (!with_subject && !without_subject) {
      if (f.size() < 4) throw DatasetError(file, rec.line, "record has too few fields");
      // Wrong option count: kept empty so the loader skips and counts it.
      out.push_back(RawRecord{Question{}, file, rec.line});
      continue;
    }
    RawRecord r;
    r.file = file;
    r.line = rec.line;
    r.question.stem = f[0];
    r.question.options.assign(f.begin() + 1, f.begin() + 1 + static_cast<long>(options.option_count));
    r.question.gold = parse_answer(f[1 + options.option_count], options.option_count, file, rec.line);
    r.question.subject = with_subject ? f.back() : subject;
    if (r.question.subject.empty()) throw DatasetError(file, rec.line, "empty subject");
    out.push_back(std::move(r));
  }
}

void read_jsonl_file(const fs::path& file, const LoadOptions& options, std::vector<RawRecord>& out) {
  std::istringstream in(read_file(file));
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw DatasetError(file, line, "not a JSON object");
    try {
      RawRecord r;
      r.file = file;
      r.line = line;
      r.question.subject = j.value("subject", subject_from_stem(file));
      r.question.stem = j.at("question").get<std::string>();
      if (j.contains("options")) {
        r.question.options = j.at("options").get<std::vector<std::string>>();
      } else {
        for (std::size_t k = 1; j.contains("option" + std::to_string(k)); ++k) {
          r.question.options.push_back(j.at("option" + std::to_string(k)).get<std::string>());
        }
      }
      if (j.contains("id")) {
        r.question.id = j.at("id").get<std::string>();
        r.has_id = true;
      }
      if (r.question.options.size() == options.option_count) {
        if (j.contains("gold")) {
          const auto& g = j.at("gold");
          r.question.gold = parse_answer(g.is_string() ? g.get<std::string>() : std::to_string(g.get<long>()),
                                         options.option_count, file, line);
        } else {
          r.question.gold = parse_answer(j.at("answer").get<std::string>(), options.option_count,
                                         file, line);
        }
      }
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw DatasetError(file, line, std::string("bad field: ") + e.what());
    }
  }
}

std::vector<fs::path> list_files(const fs::path& path, std::string_view preferred_suffix) {
  if (!fs::exists(path)) throw std::invalid_argument("dataset path " + path.string() + " does not exist");
  if (!fs::is_directory(path)) return {path};
  std::vector<fs::path> all;
  std::vector<fs::path> preferred;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (ext != ".csv" && ext != ".jsonl") continue;
    all.push_back(entry.path());
    if (entry.path().stem().string().ends_with(preferred_suffix)) preferred.push_back(entry.path());
  }
  auto& chosen = preferred.empty() ? all : preferred;
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

struct Grouped {
  std::vector<std::string> subjects;
  std::map<std::string, std::vector<Question>> by_subject;
  std::size_t skipped = 0;
};

Grouped load_grouped(const fs::path& path, std::string_view suffix, std::string_view id_infix,
                     const LoadOptions& options) {
  std::vector<RawRecord> raw;
  for (const auto& file : list_files(path, suffix)) {
    if (file.extension() == ".jsonl") {
      read_jsonl_file(file, options, raw);
    } else {
      read_csv_file(file, options, raw);
    }
  }
  Grouped g;
  std::set<std::string> ids;
  std::map<std::string, std::size_t> counters;
  for (auto& r : raw) {
    if (r.question.options.size() != options.option_count) {
      ++g.skipped;
      continue;
    }
    auto& q = r.question;
    const std::size_t ordinal = counters[q.subject]++;
    if (!r.has_id) q.id = q.subject + "/" + std::string(id_infix) + std::to_string(ordinal);
    if (!ids.insert(q.id).second) throw DatasetError(r.file, r.line, "duplicate id '" + q.id + "'");
    q.validate();
    auto [it, inserted] = g.by_subject.try_emplace(q.subject);
    if (inserted) g.subjects.push_back(q.subject);
    it->second.push_back(std::move(q));
  }
  return g;
}

}  // namespace

DatasetError::DatasetError(const fs::path& file, std::size_t line, const std::string& message)
    : std::runtime_error(file.string() + ":" + std::to_string(line) + ": " + message),
      file_(file),
      line_(line) {}

std::vector<CsvRecord> read_csv(std::string_view text, const fs::path& file) {
  std::vector<CsvRecord> out;
  CsvRecord current;
  std::string field;
  std::size_t line = 1;
  current.line = 1;
  bool quoted = false;
  bool field_started = false;
  std::size_t quote_line = 0;

  const auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  const auto end_record = [&] {
    end_field();
    out.push_back(std::move(current));
    current = CsvRecord{};
    current.line = line;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty()) {
          throw DatasetError(file, line, "stray quote inside an unquoted field");
        }
        quoted = true;
        field_started = true;
        quote_line = line;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (quoted) throw DatasetError(file, quote_line, "unterminated quoted field");
  if (field_started || !current.fields.empty()) end_record();
  return out;
}

Dataset load_dataset(const fs::path& test_path, const fs::path& dev_path,
                     const LoadOptions& options) {
  if (options.cap == 0) throw std::invalid_argument("per-subject cap must be at least 1");
  if (options.option_count < 2) throw std::invalid_argument("option count must be at least 2");

  Dataset ds;
  Grouped test = load_grouped(test_path, "_test", "", options);
  ds.skipped_records = test.skipped;
  ds.subjects = test.subjects;
  for (const auto& subject : test.subjects) {
    auto& qs = test.by_subject[subject];
    const std::size_t keep = std::min(options.cap, qs.size());
    std::move(qs.begin(), qs.begin() + static_cast<long>(keep), std::back_inserter(ds.questions));
  }
  if (!dev_path.empty()) {
    Grouped dev = load_grouped(dev_path, "_dev", "dev/", options);
    ds.skipped_records += dev.skipped;
    for (auto& [subject, qs] : dev.by_subject) ds.dev.emplace(subject, std::move(qs));
  }
  return ds;
}

}  // namespace prefcon
