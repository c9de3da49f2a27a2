#include "sarcbench/agent.hpp"

#include <cctype>

#include "sarcbench/errors.hpp"
#include "sarcbench/util.hpp"

namespace sarcbench {

using nlohmann::json;

namespace {

constexpr const char* kCorrectivePrompt =
    "Your last output was not a valid action blob. Respond with exactly one JSON object of the "
    "form {\"action\": \"Search\", \"action_input\": \"...\"} or {\"action\": \"Final Answer\", "
    "\"action_input\": \"...\"} and nothing else.";

struct Span {
  size_t begin;
  size_t end;  // one past the closing brace
};

// Balanced {...} spans, skipping over quoted strings. Non-JSON text between
// spans is ignored; an opening brace that never closes is skipped.
std::vector<Span> balanced_json_spans(const std::string& text) {
  std::vector<Span> spans;
  size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '{') {
      i++;
      continue;
    }
    int depth = 0;
    bool in_str = false;
    char quote = 0;
    bool escaped = false;
    size_t end = std::string::npos;
    for (size_t j = i; j < text.size(); j++) {
      char c = text[j];
      if (in_str) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == quote) {
          if (quote == '"') {
            in_str = false;
          } else {
            // A single quote only closes its string when followed by a
            // structural character, so embedded apostrophes stay inside.
            size_t k = j + 1;
            while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) k++;
            if (k >= text.size() || text[k] == ':' || text[k] == ',' || text[k] == '}' ||
                text[k] == ']') {
              in_str = false;
            }
          }
        }
      } else if (c == '"' || c == '\'') {
        in_str = true;
        quote = c;
      } else if (c == '{') {
        depth++;
      } else if (c == '}') {
        if (--depth == 0) {
          end = j + 1;
          break;
        }
      }
    }
    if (end == std::string::npos) {
      i++;
      continue;
    }
    spans.push_back({i, end});
    i = end;
  }
  return spans;
}

// B.4 tells the model to avoid unescaped double quotes and use single quotes;
// rewrite such blobs into strict JSON. A quote only closes a single-quoted
// string when the next non-space character is structural, so embedded
// apostrophes survive.
std::string normalize_single_quotes(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  enum class State { Outside, InSingle, InDouble };
  State state = State::Outside;
  for (size_t i = 0; i < s.size(); i++) {
    char c = s[i];
    switch (state) {
      case State::Outside:
        if (c == '\'') {
          state = State::InSingle;
          out += '"';
        } else {
          if (c == '"') state = State::InDouble;
          out += c;
        }
        break;
      case State::InSingle:
        if (c == '\\' && i + 1 < s.size() && s[i + 1] == '\'') {
          out += '\'';
          i++;
        } else if (c == '\'') {
          size_t k = i + 1;
          while (k < s.size() && std::isspace(static_cast<unsigned char>(s[k]))) k++;
          if (k >= s.size() || s[k] == ':' || s[k] == ',' || s[k] == '}' || s[k] == ']') {
            state = State::Outside;
            out += '"';
          } else {
            out += '\'';
          }
        } else if (c == '"') {
          out += "\\\"";
        } else {
          out += c;
        }
        break;
      case State::InDouble:
        if (c == '\\' && i + 1 < s.size()) {
          out += c;
          out += s[i + 1];
          i++;
        } else {
          if (c == '"') state = State::Outside;
          out += c;
        }
        break;
    }
  }
  return out;
}

std::string canonical_action_name(const std::string& raw) {
  std::string lower = to_lower(trim(raw));
  if (lower == "search") return "Search";
  if (lower == "final answer" || lower == "final_answer") return "Final Answer";
  throw UnknownActionError(trim(raw));
}

std::string action_input_to_string(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_object() && value.contains("tool_input") && value["tool_input"].is_string()) {
    return value["tool_input"].get<std::string>();
  }
  return value.dump();
}

std::string clean_thought(std::string prefix) {
  // Peel trailing "Action:" markers and markdown fences left before the blob.
  bool changed = true;
  while (changed) {
    changed = false;
    std::string t = trim(prefix);
    for (const char* suffix : {"```json", "```", "Action:", "action:"}) {
      std::string_view sv(t);
      size_t len = std::string_view(suffix).size();
      if (sv.size() >= len && starts_with_ci(sv.substr(sv.size() - len), suffix)) {
        t = t.substr(0, t.size() - len);
        changed = true;
        break;
      }
    }
    prefix = t;
  }
  std::string t = trim(prefix);
  if (starts_with_ci(t, "thought:")) t = trim(t.substr(8));
  return t;
}

}  // namespace

std::string ToolRegistry::invoke(const std::string& name, const std::string& input) const {
  auto it = tools_.find(name);
  if (it == tools_.end()) throw Error("tool not registered: " + name);
  return it->second(input);
}

ParsedAction parse_action_blob(const std::string& model_output) {
  auto spans = balanced_json_spans(model_output);
  if (spans.empty()) {
    if (model_output.find('{') != std::string::npos)
      throw InvalidJsonError("unbalanced JSON object in model output");
    throw NoJsonFoundError();
  }

  const Span& span = spans.front();
  std::string blob = model_output.substr(span.begin, span.end - span.begin);
  json parsed;
  try {
    parsed = json::parse(blob);
  } catch (const json::parse_error&) {
    try {
      parsed = json::parse(normalize_single_quotes(blob));
    } catch (const json::parse_error& e) {
      throw InvalidJsonError(e.what());
    }
  }
  if (!parsed.is_object()) throw InvalidJsonError("action blob is not a JSON object");
  if (!parsed.contains("action")) throw MissingKeyError("action");
  if (!parsed.contains("action_input")) throw MissingKeyError("action_input");
  if (!parsed["action"].is_string()) throw InvalidJsonError("'action' must be a string");

  ParsedAction result;
  result.action.name = canonical_action_name(parsed["action"].get<std::string>());
  result.action.input = action_input_to_string(parsed["action_input"]);
  result.thought = clean_thought(model_output.substr(0, span.begin));
  if (spans.size() > 1) {
    result.warning = "multiple JSON blobs in model output; only the first was used";
  }
  return result;
}

AgentTrace run_agent(LlmClient& client, const Sample& sample, const ToolRegistry& tools,
                     const EndpointConfig& ep, const GenerationConfig& cfg,
                     const AgentOptions& options) {
  AgentTrace trace;
  trace.sample_id = sample.id;

  PromptBundle bundle = build_kg_initial_bundle(sample);
  bool corrective_used = false;
  int tool_errors = 0;
  const int max_steps = std::max(1, options.max_steps);

  while (static_cast<int>(trace.steps.size()) < max_steps) {
    Completion completion;
    try {
      completion = client.complete(bundle, cfg, ep);
    } catch (const Error& e) {
      trace.outcome = {OutcomeKind::ProtocolFailure, std::string("client error: ") + e.what()};
      return trace;
    }

    ParsedAction parsed;
    try {
      parsed = parse_action_blob(completion.text);
    } catch (const Error& e) {
      if (!corrective_used) {
        corrective_used = true;
        trace.warnings.push_back(std::string("malformed action blob: ") + e.what());
        bundle.messages.push_back({Role::Assistant, completion.text});
        bundle.messages.push_back({Role::User, kCorrectivePrompt});
        continue;
      }
      trace.outcome = {OutcomeKind::ProtocolFailure, "no action blob"};
      return trace;
    }
    if (parsed.warning) trace.warnings.push_back(*parsed.warning);

    if (parsed.action.name == "Final Answer") {
      trace.steps.push_back({parsed.thought, parsed.action, ""});
      trace.outcome = {OutcomeKind::FinalAnswer, parsed.action.input};
      return trace;
    }

    std::string observation;
    bool tool_failed = false;
    try {
      observation = tools.invoke(parsed.action.name, parsed.action.input);
    } catch (const std::exception& e) {
      observation = std::string("Error: ") + e.what();
      tool_failed = true;
    }
    trace.steps.push_back({parsed.thought, parsed.action, observation});
    if (tool_failed && ++tool_errors > 1) {
      trace.outcome = {OutcomeKind::ProtocolFailure, "repeated tool failure"};
      return trace;
    }

    bundle.messages.push_back({Role::Assistant, completion.text});
    bundle.messages.push_back({Role::User, "Observation: " + observation});
  }

  trace.outcome = {OutcomeKind::StepBudgetExceeded, ""};
  return trace;
}

namespace {

std::string outcome_kind_name(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::FinalAnswer: return "final_answer";
    case OutcomeKind::StepBudgetExceeded: return "step_budget_exceeded";
    case OutcomeKind::ProtocolFailure: return "protocol_failure";
  }
  return "protocol_failure";
}

OutcomeKind outcome_kind_from_name(const std::string& name) {
  if (name == "final_answer") return OutcomeKind::FinalAnswer;
  if (name == "step_budget_exceeded") return OutcomeKind::StepBudgetExceeded;
  if (name == "protocol_failure") return OutcomeKind::ProtocolFailure;
  throw Error("unknown outcome kind '" + name + "'");
}

}  // namespace

json trace_to_json(const AgentTrace& trace) {
  json steps = json::array();
  for (const auto& step : trace.steps) {
    steps.push_back({{"thought", step.thought},
                     {"action", {{"name", step.action.name}, {"input", step.action.input}}},
                     {"observation", step.observation}});
  }
  return json{{"sample_id", trace.sample_id},
              {"steps", steps},
              {"outcome", {{"kind", outcome_kind_name(trace.outcome.kind)},
                           {"text", trace.outcome.text}}},
              {"warnings", trace.warnings}};
}

AgentTrace trace_from_json(const json& j) {
  AgentTrace trace;
  trace.sample_id = j.at("sample_id").get<std::string>();
  for (const auto& step : j.at("steps")) {
    AgentStep s;
    s.thought = step.at("thought").get<std::string>();
    s.action.name = step.at("action").at("name").get<std::string>();
    s.action.input = step.at("action").at("input").get<std::string>();
    s.observation = step.at("observation").get<std::string>();
    trace.steps.push_back(std::move(s));
  }
  trace.outcome.kind = outcome_kind_from_name(j.at("outcome").at("kind").get<std::string>());
  trace.outcome.text = j.at("outcome").at("text").get<std::string>();
  if (j.contains("warnings")) trace.warnings = j["warnings"].get<std::vector<std::string>>();
  return trace;
}

CompatibilityVerdict kg_compatibility_check(const std::vector<AgentTrace>& traces,
                                            double threshold) {
  CompatibilityVerdict verdict;
  verdict.threshold = threshold;
  if (traces.empty()) return verdict;
  size_t failures = 0;
  for (const auto& trace : traces) {
    if (trace.outcome.kind == OutcomeKind::ProtocolFailure) failures++;
  }
  verdict.failure_fraction = static_cast<double>(failures) / static_cast<double>(traces.size());
  verdict.compatible = verdict.failure_fraction <= threshold;
  return verdict;
}

}  // namespace sarcbench
