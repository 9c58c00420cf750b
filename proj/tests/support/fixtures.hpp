#pragma once

// Synthetic benchmark files and scratch directories for tests.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>

#include <unistd.h>

#include <nlohmann/json.hpp>

namespace prefcon::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("prefcon-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string subject_name(std::size_t s) {
  return "subject_" + std::string(s < 10 ? "0" : "") + std::to_string(s);
}

/// JSONL test and dev files: `subjects` subjects with `per_subject` test and
/// `dev_per_subject` dev questions each, `options` options, gold cycling
/// through the positions.
inline void write_benchmark(const std::filesystem::path& dir, std::size_t subjects,
                            std::size_t per_subject, std::size_t dev_per_subject = 5,
                            std::size_t options = 4) {
  std::filesystem::create_directories(dir);
  const auto write = [&](const std::string& name, std::size_t count, const std::string& tag) {
    std::ofstream out(dir / name);
    for (std::size_t s = 0; s < subjects; ++s) {
      for (std::size_t q = 0; q < count; ++q) {
        nlohmann::json j;
        j["subject"] = subject_name(s);
        j["question"] = tag + " question " + std::to_string(q) + " about " + subject_name(s) + "?";
        std::vector<std::string> opts;
        for (std::size_t k = 0; k < options; ++k) {
          opts.push_back("choice " + std::to_string(k) + " for " + tag + std::to_string(q));
        }
        j["options"] = opts;
        j["gold"] = (q + s) % options;
        out << j.dump() << '\n';
      }
    }
  };
  write("test.jsonl", per_subject, "test");
  write("dev.jsonl", dev_per_subject, "dev");
}

}  // namespace prefcon::testing
