#pragma once

// Benchmark ingestion. Accepted inputs:
//
//  * a directory in the published per-subject layout: `<subject>_test.csv`
//    or `<subject>_dev.csv` files with rows `question,A,B,C,D,answer` and no
//    header; subjects are taken in file-name order;
//  * a single `.csv` file with rows `question,opt1..optN,answer[,subject]`;
//    without a subject column the subject is the file stem minus a
//    `_test`/`_dev` suffix;
//  * a `.jsonl` file, one object per line:
//    {"subject", "question", "options": [...] | "option1".."optionN",
//     "gold": index | "answer": letter, "id"?}.
//
// Answers are a letter (A, B, ...) or a zero-based index.

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "prefcon/question.hpp"

namespace prefcon {

class DatasetError : public std::runtime_error {
 public:
  DatasetError(const std::filesystem::path& file, std::size_t line, const std::string& message);

  const std::filesystem::path& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::filesystem::path file_;
  std::size_t line_;
};

struct LoadOptions {
  /// Per-subject cap on test questions; the first `cap` in file order are kept.
  std::size_t cap = 20;
  /// Records with any other option count are skipped and counted.
  std::size_t option_count = 4;
};

struct Dataset {
  /// Grouped by subject; subjects and questions keep input order.
  std::vector<Question> questions;
  DevSet dev;
  std::vector<std::string> subjects;
  std::size_t skipped_records = 0;
};

/// `dev_path` may be empty. Throws DatasetError (with file and line) for
/// malformed records and std::invalid_argument for missing paths.
Dataset load_dataset(const std::filesystem::path& test_path,
                     const std::filesystem::path& dev_path, const LoadOptions& options = {});

/// RFC 4180 reader: quoted fields, doubled quotes, embedded newlines.
/// Returns each record with the 1-based line it starts on.
struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;
};
std::vector<CsvRecord> read_csv(std::string_view text, const std::filesystem::path& file = {});

}  // namespace prefcon
