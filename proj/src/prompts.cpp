#include "sarcbench/prompts.hpp"

#include "sarcbench/errors.hpp"
#include "sarcbench/util.hpp"

namespace sarcbench {

namespace {

constexpr const char* kZeroTemplate =
    "For the provided text, perform one of the tasks. If the text is not sarcastic, output "
    "'not_sarcastic'. If the text is sarcastic, provide an explanation in one or two sentences. "
    "Output 'need_context' if you cannot explain the sarcasm.";

constexpr const char* kFewIntro =
    "For the provided text, perform one of the tasks. If the text is not sarcastic, output "
    "'not_sarcastic'. If the text is sarcastic, provide an explanation in one or two sentences. "
    "Output 'need_context' if you cannot explain the sarcasm. Following are some examples of "
    "sarcastic texts and their explanations.";

// The "[Australian/Indian]" slot is filled from the sample's variety.
constexpr const char* kOriginTemplate =
    "This text is from {origin} subreddit post or comment. If the text is not sarcastic, output "
    "'not_sarcastic'. If the text is sarcastic, provide an explanation in one or two sentences. "
    "Output 'need_context' if you cannot explain the sarcasm.";

constexpr const char* kKgTemplate =
    R"__(Think step-by-step and feel free to use tools whenever they would be helpful.
Once you have finished reasoning and using tools:
- If the text is not sarcastic:
{"action": "Final Answer", "action_input": "not_sarcastic"}
- If the text is sarcastic:
{"action": "Final Answer", "action_input": "sarcastic. Explanation: concise explanation (1-2 sentences)"}
- If you cannot explain the sarcasm:
{"action": "Final Answer", "action_input": "need_context"}
All outputs must be valid JSON, with no unescaped double quotes; use single quotes. You have access to the following tools:
- Search: Tool for getting up to date answers to current or historical events and word/phrase definitions., args: {'tool_input': {'type': 'string'}}
Use a json blob to specify a tool by providing an action key (tool name) and an action_input key (tool input). Valid "action" values are: "Final Answer" or "Search".

Provide only ONE action per $JSON_BLOB, as shown:
{"action": $TOOL_NAME, "action_input": $INPUT}

Follow this format:

Question: input question to answer
Thought: consider previous and subsequent steps
Action:
$JSON_BLOB
Observation: action result
... (repeat Thought/Action/Observation N times)
Thought: I know what to respond
Action:
{"action": "Final Answer", "action_input": "Final response to human"}

Begin! Reminder to ALWAYS respond with a valid json blob of a single action. Use tools if necessary. Respond directly if appropriate. Format is
Action:$JSON_BLOB then Observation:.
Thought:)__";

constexpr const char* kPmpTemplate =
    R"__(For the provided text, perform one of the tasks. If the text is not sarcastic, output 'not_sarcastic'. If the text is sarcastic, follow these steps in your analysis:
1. Comprehension of Context/Understanding:
   - Repeat the text and summarize it to confirm your understanding
   - Identify the context, topic, and key elements of the situation described
2. General Pragmatic Analysis:
   - What does the author imply about the situation with their statement?
   - What does the author think about the situation?
   - Are what the author implies and what they think saying the same thing?
   - Is the author pretending to have a certain attitude toward the conversation?
3. Preliminary Judgment:
   - Based on your analysis, formulate an initial explanation of why the text is sarcastic
4. Comprehension of Preliminary Judgment/Context:
   - Summarize your preliminary analysis
   - Ensure you've captured all relevant contextual elements
5. Specific Pragmatic Analysis/Reassessment:
   - Implicature: What is implied beyond the literal meaning?
   - Presuppositions: What information is taken for granted?
   - Intent: What does the author hope to achieve with their statement?
   - Polarity: Is there a mismatch between apparent and intended tone?
   - Pretense: Is there pretense in the author's attitude?
   - Meaning gap: What is the difference between literal and implied meaning?
   - Context: Consider slang, cultural references, or communication patterns
6. After completing your analysis, perform one of the tasks.
   - If the text is sarcastic, provide an explanation in one or two sentences.
   - Output 'need_context' if you cannot explain the sarcasm.)__";

std::string user_text_line(const Sample& sample) { return "Text: " + sample.text; }

std::string few_system_text() {
  std::string out = kFewIntro;
  const auto& exemplars = few_shot_exemplars();
  for (size_t i = 0; i < exemplars.size(); i++) {
    out += "\n" + std::to_string(i + 1) + ". Text: " + exemplars[i].text;
    out += "\nExplanation: " + exemplars[i].explanation;
  }
  return out;
}

}  // namespace

std::string strategy_code(Strategy s) {
  switch (s) {
    case Strategy::Zero: return "zero";
    case Strategy::Few: return "few";
    case Strategy::Origin: return "origin";
    case Strategy::Kg: return "kg";
    case Strategy::Pmp: return "pmp";
  }
  return "zero";
}

std::optional<Strategy> strategy_from_code(std::string_view code) {
  if (code == "zero") return Strategy::Zero;
  if (code == "few") return Strategy::Few;
  if (code == "origin") return Strategy::Origin;
  if (code == "kg") return Strategy::Kg;
  if (code == "pmp") return Strategy::Pmp;
  return std::nullopt;
}

std::string role_name(Role r) {
  switch (r) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

const std::vector<Exemplar>& few_shot_exemplars() {
  static const std::vector<Exemplar> exemplars = {
      {"I got the greatest news today when I found out my company is getting rid of me after 10 "
       "years of faithful service",
       "sarcastic. Being fired from a job after 10 years of service is not something to be happy "
       "about and hence receiving the greatest news is sarcastic."},
      {"I feel great that I am single and have not accomplished anything significant inspite of "
       "being 30 years old",
       "sarcastic. Someone who is 30 years old and single has not achieved anything significant "
       "in their life so far and so should not feel honored by that fact."},
      {"The idea of the genius Republican party blatantly rejecting climate change and its "
       "effects on our planet makes me feel safe for the future",
       "sarcastic. The Republican party's denial of climate change will have catastrophic effects "
       "on our planet in the future and so to feel confident about the future is absurd."},
      {"I was so impressed when my hair dresser tried a new product on my hair but the end result "
       "was me getting to shave all my hair off",
       "sarcastic. Shaving all your hair off is not an impressive hairstyle and is often seen as "
       "a last resort when someone has messed up your hair."},
      {"I am on seventh heaven because I don't have enough money to pay my important bill.",
       "sarcastic. Having not enough money to pay an important bill creates a lot of stress and "
       "anxiety and is definitely not a heavenly feeling."},
  };
  return exemplars;
}

PromptBundle build_prompt(Strategy strategy, const Sample& sample) {
  PromptBundle bundle;
  bundle.strategy = strategy;

  std::string system_text;
  switch (strategy) {
    case Strategy::Zero:
      system_text = kZeroTemplate;
      break;
    case Strategy::Few:
      system_text = few_system_text();
      break;
    case Strategy::Origin: {
      if (sample.variety == Variety::StandardAmerican) throw OriginUnsupportedVarietyError();
      system_text = replace_all(kOriginTemplate, "{origin}", variety_name(sample.variety));
      break;
    }
    case Strategy::Pmp:
      system_text = kPmpTemplate;
      break;
    case Strategy::Kg:
      return build_kg_initial_bundle(sample);
  }

  bundle.messages.push_back({Role::System, std::move(system_text)});
  bundle.messages.push_back({Role::User, user_text_line(sample)});
  return bundle;
}

std::string build_kg_system_prompt() { return kKgTemplate; }

PromptBundle build_kg_initial_bundle(const Sample& sample) {
  PromptBundle bundle;
  bundle.strategy = Strategy::Kg;
  bundle.messages.push_back({Role::System, build_kg_system_prompt()});
  bundle.messages.push_back({Role::User, user_text_line(sample)});
  return bundle;
}

std::string render_bundle(const PromptBundle& bundle) {
  std::string out;
  for (const auto& msg : bundle.messages) {
    out += "[" + role_name(msg.role) + "]\n";
    out += msg.content;
    out += "\n\n";
  }
  if (!out.empty()) out.pop_back();  // single trailing newline
  return out;
}

}  // namespace sarcbench
