#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sarcbench/dataset.hpp"

namespace sarcbench {

enum class Strategy { Zero, Few, Origin, Kg, Pmp };

std::string strategy_code(Strategy s);
std::optional<Strategy> strategy_from_code(std::string_view code);

enum class Role { System, User, Assistant };

std::string role_name(Role r);

struct Message {
  Role role = Role::User;
  std::string content;
  bool operator==(const Message&) const = default;
};

struct PromptBundle {
  std::vector<Message> messages;
  Strategy strategy = Strategy::Zero;
};

struct Exemplar {
  std::string text;
  std::string explanation;
};

/// The five fixed few-shot exemplar pairs, in order.
const std::vector<Exemplar>& few_shot_exemplars();

/// Build the full bundle for ZERO / FEW / ORIGIN / PMP. KG runs start from
/// build_kg_system_prompt() and are driven by the agent runtime.
/// Pure: identical inputs yield byte-identical bundles.
PromptBundle build_prompt(Strategy strategy, const Sample& sample);

/// The KG agent scaffold: tool listing, single-action JSON blob grammar, and the
/// Thought/Action/Observation format. Ends with the turn-opening cue "Thought:".
std::string build_kg_system_prompt();

/// Initial messages for a KG episode (system scaffold + "Text: ..." user turn).
PromptBundle build_kg_initial_bundle(const Sample& sample);

/// Plain-text rendering of a bundle, used by goldens and `explain-prompt`.
std::string render_bundle(const PromptBundle& bundle);

}  // namespace sarcbench
