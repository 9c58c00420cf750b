#include "prefcon/templates.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace prefcon {
namespace {

constexpr std::array<std::string_view, 10> kPlaceholders = {
    "instruction", "examples", "question", "options", "answer_syntax",
    "answer",      "label",    "text",     "subject", "marker"};

constexpr std::array<std::string_view, 12> kRequiredSections = {
    "body",
    "example",
    "option",
    "instruction.single_select",
    "instruction.ordinal_ranking.descending",
    "instruction.ordinal_ranking.ascending",
    "instruction.cardinal_ranking",
    "instruction.binary_comparison",
    "syntax.single_select",
    "syntax.ordinal_ranking",
    "syntax.cardinal_ranking",
    "syntax.binary_comparison"};

bool is_placeholder_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

/// Single left-to-right pass; substituted values are never rescanned.
std::string substitute(std::string_view text,
                       const std::map<std::string_view, std::string_view>& values) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] == '{') {
      std::size_t end = pos + 1;
      while (end < text.size() && is_placeholder_char(text[end])) ++end;
      if (end < text.size() && text[end] == '}' && end > pos + 1) {
        const auto name = text.substr(pos + 1, end - pos - 1);
        const auto it = values.find(name);
        if (it != values.end()) {
          out += it->second;
          pos = end + 1;
          continue;
        }
      }
    }
    out += text[pos++];
  }
  return out;
}

void check_placeholders(std::string_view section, std::string_view text) {
  std::size_t pos = 0;
  while ((pos = text.find('{', pos)) != std::string_view::npos) {
    std::size_t end = pos + 1;
    while (end < text.size() && is_placeholder_char(text[end])) ++end;
    if (end < text.size() && text[end] == '}' && end > pos + 1) {
      const auto name = text.substr(pos + 1, end - pos - 1);
      if (std::find(kPlaceholders.begin(), kPlaceholders.end(), name) == kPlaceholders.end()) {
        throw std::invalid_argument("template section [" + std::string(section) +
                                    "] uses unknown placeholder {" + std::string(name) + "}");
      }
    }
    pos = end;
  }
}

std::string instruction_key(const TaskInstance& task) {
  std::string key = "instruction." + std::string(to_string(task.format));
  if (task.format == TaskFormat::kOrdinalRanking) key += "." + std::string(to_string(task.direction));
  return key;
}

}  // namespace

// Defined in the generated default_template.cpp.
extern const char* const kDefaultTemplateText;

std::string_view default_template_text() { return kDefaultTemplateText; }

PromptTemplate PromptTemplate::parse(std::string_view text) {
  PromptTemplate t;
  std::string current;
  bool in_section = false;
  std::string body;
  const auto flush = [&] {
    if (!in_section) return;
    while (!body.empty() && (body.back() == '\n' || body.back() == '\r')) body.pop_back();
    check_placeholders(current, body);
    if (!t.sections_.emplace(current, body).second) {
      throw std::invalid_argument("template section [" + current + "] defined twice");
    }
    body.clear();
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const auto stripped = trim(line);
    if (stripped.size() > 2 && stripped.front() == '[' && stripped.back() == ']' &&
        stripped.find(' ') == std::string_view::npos) {
      flush();
      current = std::string(stripped.substr(1, stripped.size() - 2));
      in_section = true;
      continue;
    }
    if (in_section) {
      body += line;
      body += '\n';
      continue;
    }
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("template header line " + std::to_string(line_no) +
                                  " is not 'key = value'");
    }
    const auto key = trim(stripped.substr(0, eq));
    const auto value = std::string(trim(stripped.substr(eq + 1)));
    if (key == "name") {
      t.name_ = value;
    } else if (key == "version") {
      try {
        t.version_ = std::stoi(value);
      } catch (const std::exception&) {
        throw std::invalid_argument("template version '" + value + "' is not an integer");
      }
    } else if (key == "answer_marker") {
      t.marker_ = value;
    } else {
      throw std::invalid_argument("unknown template header key '" + std::string(key) + "'");
    }
  }
  flush();

  if (t.name_.empty()) throw std::invalid_argument("template has no name");
  if (t.version_ <= 0) throw std::invalid_argument("template version must be positive");
  if (t.marker_.empty()) throw std::invalid_argument("template answer marker is empty");
  for (auto key : kRequiredSections) {
    if (!t.sections_.contains(key)) {
      throw std::invalid_argument("template lacks section [" + std::string(key) + "]");
    }
  }
  return t;
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open template file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string PromptTemplate::id() const { return name_ + "@" + std::to_string(version_); }

const std::string& PromptTemplate::section(std::string_view key) const {
  const auto it = sections_.find(key);
  if (it == sections_.end()) throw std::out_of_range("no template section " + std::string(key));
  return it->second;
}

std::string PromptTemplate::render(const TaskInstance& task) const {
  const auto render_options = [&](const LabeledQuestion& q) {
    std::string out;
    for (std::size_t p = 0; p < q.view.option_count(); ++p) {
      if (p > 0) out += '\n';
      out += substitute(section("option"),
                        {{"label", q.labels.token(p)}, {"text", q.view.options[p]}});
    }
    return out;
  };

  std::string examples;
  for (const auto& ex : task.few_shot) {
    const std::string options = render_options(ex.question);
    examples += substitute(section("example"), {{"question", ex.question.view.stem},
                                                {"options", options},
                                                {"answer", ex.answer_text}});
    examples += "\n\n";
  }

  const std::string subject = task.original ? task.original->subject : task.display.view.subject;
  const std::string instruction =
      substitute(section(instruction_key(task)), {{"subject", subject}});
  const std::string syntax = substitute(
      section("syntax." + std::string(to_string(task.format))), {{"marker", marker_}});
  const std::string options = render_options(task.display);

  return substitute(section("body"), {{"instruction", instruction},
                                      {"examples", examples},
                                      {"question", task.display.view.stem},
                                      {"options", options},
                                      {"answer_syntax", syntax}});
}

TemplateRegistry::TemplateRegistry() { add(PromptTemplate::parse(default_template_text())); }

void TemplateRegistry::add(PromptTemplate t) {
  const std::string id = t.id();
  by_id_.insert_or_assign(id, std::move(t));
}

const PromptTemplate& TemplateRegistry::get(std::string_view name, int version) const {
  const std::string id = std::string(name) + "@" + std::to_string(version);
  const auto it = by_id_.find(id);
  if (it == by_id_.end()) throw std::out_of_range("no prompt template " + id);
  return it->second;
}

bool TemplateRegistry::contains(std::string_view name, int version) const {
  return by_id_.contains(std::string(name) + "@" + std::to_string(version));
}

std::string build_prompt(const TaskInstance& task, const PromptTemplate& tmpl) {
  return tmpl.render(task);
}

}  // namespace prefcon
