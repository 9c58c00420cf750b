#pragma once

// Plain-text prompt templates with named placeholders.
//
// File layout: optional `key = value` header lines (name, version,
// answer_marker) and `#` comments, followed by `[section]` blocks. A section
// runs until the next header line; its trailing newlines are dropped.
//
// Required sections:
//   body                      {instruction} {examples} {question} {options} {answer_syntax}
//   example                   {question} {options} {answer}
//   option                    {label} {text}
//   instruction.single_select, instruction.ordinal_ranking.descending,
//   instruction.ordinal_ranking.ascending, instruction.cardinal_ranking,
//   instruction.binary_comparison                         {subject}
//   syntax.single_select, syntax.ordinal_ranking, syntax.cardinal_ranking,
//   syntax.binary_comparison                              {marker}

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "prefcon/protocol.hpp"

namespace prefcon {

class PromptTemplate {
 public:
  /// Throws std::invalid_argument on syntax errors, missing sections or
  /// unknown placeholders.
  static PromptTemplate parse(std::string_view text);
  static PromptTemplate load(const std::filesystem::path& path);

  const std::string& name() const { return name_; }
  int version() const { return version_; }
  /// "<name>@<version>", recorded with every response.
  std::string id() const;
  const std::string& answer_marker() const { return marker_; }
  const std::string& section(std::string_view key) const;

  std::string render(const TaskInstance& task) const;

 private:
  std::string name_;
  int version_ = 0;
  std::string marker_ = "Answer:";
  std::map<std::string, std::string, std::less<>> sections_;
};

/// Templates addressable by name and version; the built-in default@1 is
/// always present.
class TemplateRegistry {
 public:
  TemplateRegistry();

  void add(PromptTemplate t);
  /// Throws std::out_of_range when absent.
  const PromptTemplate& get(std::string_view name, int version) const;
  bool contains(std::string_view name, int version) const;

 private:
  std::map<std::string, PromptTemplate, std::less<>> by_id_;
};

/// Text of the built-in default template.
std::string_view default_template_text();

/// Deterministic prompt for `task`.
std::string build_prompt(const TaskInstance& task, const PromptTemplate& tmpl);

}  // namespace prefcon
