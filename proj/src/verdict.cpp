#include "sarcbench/verdict.hpp"

#include <regex>

#include "sarcbench/errors.hpp"
#include "sarcbench/util.hpp"

namespace sarcbench {

namespace {

const std::regex& ns_pattern() {
  static const std::regex re(R"(\bnot[_\s]sarcastic\b)", std::regex::icase);
  return re;
}

const std::regex& nc_pattern() {
  static const std::regex re(R"(\bneeds?_context\b)", std::regex::icase);
  return re;
}

bool matches(const std::regex& re, const std::string& s) {
  return std::regex_search(s, re);
}

std::string last_nonempty_line(const std::string& text) {
  auto lines = split_lines(text);
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    auto t = trim(*it);
    if (!t.empty()) return t;
  }
  return "";
}

// Strips leading "sarcastic." / "Explanation:" style markers (and markdown
// decoration around them) off the front of an explanation candidate.
std::string strip_label_markers(std::string s) {
  bool changed = true;
  while (changed) {
    changed = false;
    size_t i = 0;
    while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == '*' ||
                            s[i] == '#' || s[i] == '>'))
      i++;
    std::string_view rest(s.data() + i, s.size() - i);
    if (starts_with_ci(rest, "sarcastic")) {
      size_t j = i + 9;
      while (j < s.size() && s[j] == '*') j++;
      if (j < s.size() && (s[j] == '.' || s[j] == ':' || s[j] == ',' || s[j] == '\n')) {
        s = s.substr(j + 1);
        changed = true;
        continue;
      }
    }
    if (starts_with_ci(rest, "explanation")) {
      size_t j = i + 11;
      while (j < s.size() && s[j] == '*') j++;
      if (j < s.size() && (s[j] == ':' || s[j] == '.')) {
        s = s.substr(j + 1);
        changed = true;
        continue;
      }
    }
  }
  return trim(s);
}

// Last step-6 / "Final Explanation" header in a PMP completion, if any.
// Returns the offset just past the header (and past a same-line title such as
// "Step 6: Final Explanation"), or npos.
size_t find_pmp_final_header(const std::string& text) {
  static const std::regex re(R"((step\s*6\b[^\n]*?(:|\n|$))|(final\s+explanation\s*:?))",
                             std::regex::icase);
  size_t best = std::string::npos;
  auto begin = std::sregex_iterator(text.begin(), text.end(), re);
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    best = static_cast<size_t>(it->position()) + static_cast<size_t>(it->length());
  }
  return best;
}

}  // namespace

std::string extract_explanation(const std::string& text, Strategy strategy) {
  std::string t = trim(text);
  if (t.empty()) throw NoExplanationFoundError();

  if (strategy == Strategy::Pmp) {
    size_t after = find_pmp_final_header(t);
    if (after != std::string::npos) {
      std::string rest = strip_label_markers(t.substr(after));
      if (!rest.empty()) return rest;
    }
    auto paragraphs = split_paragraphs(t);
    if (paragraphs.empty()) throw NoExplanationFoundError();
    std::string rest = strip_label_markers(paragraphs.back());
    if (rest.empty()) throw NoExplanationFoundError();
    return rest;
  }

  std::string stripped = strip_label_markers(t);
  if (stripped.size() != t.size()) {
    if (stripped.empty()) throw NoExplanationFoundError();
    return stripped;
  }
  auto paragraphs = split_paragraphs(t);
  if (paragraphs.empty()) throw NoExplanationFoundError();
  std::string rest = strip_label_markers(paragraphs.back());
  if (rest.empty()) throw NoExplanationFoundError();
  return rest;
}

Verdict parse_verdict(const std::string& text, Strategy strategy, bool* no_explanation) {
  if (no_explanation) *no_explanation = false;
  if (trim(text).empty()) throw EmptyCompletionError();

  const std::string final_line = last_nonempty_line(text);
  if (matches(ns_pattern(), final_line)) return Verdict::not_sarcastic();
  if (matches(nc_pattern(), final_line)) return Verdict::need_context();
  if (matches(ns_pattern(), text)) return Verdict::not_sarcastic();
  if (matches(nc_pattern(), text)) return Verdict::need_context();

  try {
    return Verdict::sarcastic(extract_explanation(text, strategy));
  } catch (const NoExplanationFoundError&) {
    if (no_explanation) *no_explanation = true;
    return Verdict::need_context();
  }
}

std::string render_verdict(const Verdict& v) {
  switch (v.kind) {
    case VerdictKind::NotSarcastic: return "not_sarcastic";
    case VerdictKind::NeedContext: return "need_context";
    case VerdictKind::Sarcastic: return "sarcastic. Explanation: " + v.explanation;
  }
  return "need_context";
}

nlohmann::json verdict_to_json(const Verdict& v) {
  nlohmann::json j;
  switch (v.kind) {
    case VerdictKind::NotSarcastic: j["verdict"] = "not_sarcastic"; break;
    case VerdictKind::NeedContext: j["verdict"] = "need_context"; break;
    case VerdictKind::Sarcastic:
      j["verdict"] = "sarcastic";
      j["explanation"] = v.explanation;
      break;
  }
  return j;
}

Verdict verdict_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("verdict").get<std::string>();
  if (kind == "not_sarcastic") return Verdict::not_sarcastic();
  if (kind == "need_context") return Verdict::need_context();
  if (kind == "sarcastic") return Verdict::sarcastic(j.at("explanation").get<std::string>());
  throw Error("unknown verdict kind '" + kind + "'");
}

}  // namespace sarcbench
