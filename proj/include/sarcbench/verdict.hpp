#pragma once

#include <string>

#include <json.hpp>

#include "sarcbench/prompts.hpp"

namespace sarcbench {

enum class VerdictKind { NotSarcastic, NeedContext, Sarcastic };

struct Verdict {
  VerdictKind kind = VerdictKind::NeedContext;
  std::string explanation;  // non-empty iff kind == Sarcastic

  static Verdict not_sarcastic() { return {VerdictKind::NotSarcastic, ""}; }
  static Verdict need_context() { return {VerdictKind::NeedContext, ""}; }
  static Verdict sarcastic(std::string explanation) {
    return {VerdictKind::Sarcastic, std::move(explanation)};
  }

  bool operator==(const Verdict&) const = default;
};

/// Map raw completion text into a three-way verdict.
/// Label matching scans the final non-empty line first, then the whole text;
/// both 'need_context' and 'needs_context' spellings are accepted.
/// A sarcastic text whose explanation cannot be located maps to NeedContext
/// (set `no_explanation` when a caller wants to log that fallback).
Verdict parse_verdict(const std::string& text, Strategy strategy,
                      bool* no_explanation = nullptr);

/// Extract the explanation from a completion already classified sarcastic.
/// PMP: content after the last step-6 / "Final Explanation" header, else the
/// last paragraph. Other strategies: strip leading "sarcastic." and
/// "Explanation:" markers; with no markers, a multi-paragraph completion
/// yields its last paragraph. Throws NoExplanationFoundError.
std::string extract_explanation(const std::string& text, Strategy strategy);

/// Canonical rendering; parse_verdict(render_verdict(v), s) == v for
/// explanations free of label tokens.
std::string render_verdict(const Verdict& v);

nlohmann::json verdict_to_json(const Verdict& v);
Verdict verdict_from_json(const nlohmann::json& j);

}  // namespace sarcbench
