#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sarcbench/dataset.hpp"
#include "sarcbench/llm_client.hpp"

namespace sarcbench {

struct Action {
  std::string name;   // "Search" | "Final Answer"
  std::string input;
  bool operator==(const Action&) const = default;
};

struct AgentStep {
  std::string thought;
  Action action;
  std::string observation;  // empty for Final Answer
  bool operator==(const AgentStep&) const = default;
};

enum class OutcomeKind { FinalAnswer, StepBudgetExceeded, ProtocolFailure };

struct AgentOutcome {
  OutcomeKind kind = OutcomeKind::ProtocolFailure;
  std::string text;  // final answer, or failure reason
  bool operator==(const AgentOutcome&) const = default;
};

struct AgentTrace {
  std::string sample_id;
  std::vector<AgentStep> steps;
  AgentOutcome outcome;
  std::vector<std::string> warnings;
  bool operator==(const AgentTrace&) const = default;
};

nlohmann::json trace_to_json(const AgentTrace& trace);
AgentTrace trace_from_json(const nlohmann::json& j);

/// Tools callable from the agent loop; must contain "Search" for KG runs.
/// Safe for concurrent invocation as long as the registered callables are.
class ToolRegistry {
 public:
  void register_tool(std::string name, std::function<std::string(const std::string&)> fn) {
    tools_[std::move(name)] = std::move(fn);
  }
  bool has(const std::string& name) const { return tools_.count(name) > 0; }
  std::string invoke(const std::string& name, const std::string& input) const;

 private:
  std::map<std::string, std::function<std::string(const std::string&)>> tools_;
};

struct ParsedAction {
  std::string thought;
  Action action;
  std::optional<std::string> warning;  // e.g. multiple blobs in one output
};

/// Parse one Thought + single-action JSON blob out of raw model output.
/// Tolerates single-quoted blobs and an {"tool_input": ...} wrapped input.
/// Throws NoJsonFoundError, InvalidJsonError, UnknownActionError, MissingKeyError.
ParsedAction parse_action_blob(const std::string& model_output);

struct AgentOptions {
  int max_steps = 8;
};

/// Drive one KG episode: complete -> parse blob -> dispatch tool -> append
/// "Observation: ..." -> repeat, until Final Answer, the step budget, or a
/// protocol failure (after one corrective re-prompt / one tolerated tool error).
AgentTrace run_agent(LlmClient& client, const Sample& sample, const ToolRegistry& tools,
                     const EndpointConfig& ep, const GenerationConfig& cfg,
                     const AgentOptions& options = {});

struct CompatibilityVerdict {
  bool compatible = true;
  double failure_fraction = 0.0;
  double threshold = 0.5;
};

/// Marks a (model, dataset) run incompatible when the ProtocolFailure fraction
/// exceeds the threshold; the report renders such runs as n/a.
CompatibilityVerdict kg_compatibility_check(const std::vector<AgentTrace>& traces,
                                            double threshold = 0.5);

}  // namespace sarcbench
