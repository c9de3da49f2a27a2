#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sarcbench {

enum class Variety { StandardAmerican, Australian, Indian };

/// Wire codes used by the JSONL schema ("us" | "au" | "in").
std::string variety_code(Variety v);
std::optional<Variety> variety_from_code(std::string_view code);

/// Human-readable name for prompt slots ("Australian" / "Indian").
std::string variety_name(Variety v);

struct Sample {
  std::string id;
  std::string text;
  Variety variety = Variety::StandardAmerican;
  std::string gold_label;        // in scope always "sarcastic"
  std::string gold_explanation;  // non-empty whenever gold_label == "sarcastic"

  bool is_sarcastic() const { return gold_label == "sarcastic"; }
  bool operator==(const Sample&) const = default;
};

/// Samples keep file order; immutable after load and safe to share across threads.
struct Dataset {
  std::string name;
  std::vector<Sample> samples;
};

struct StatsRow {
  std::size_t n = 0;
  double avg_text_words = 0.0;
  double avg_expl_words = 0.0;
};

/// Number of maximal non-whitespace runs.
std::size_t word_count(std::string_view text);

/// Load a FLUTE-compatible JSONL file. Fields: id, text, variety, label, explanation.
/// Non-sarcastic rows are accepted; the runner skips them with a warning.
Dataset load_dataset(const std::filesystem::path& path,
                     std::optional<Variety> expected_variety = std::nullopt,
                     std::string name = "");

/// Serialize back to the JSONL schema; round-trips load_dataset field-for-field.
std::string serialize_dataset(const Dataset& ds);

StatsRow dataset_stats(const Dataset& ds);

}  // namespace sarcbench
