#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sarcbench/agent.hpp"
#include "sarcbench/dataset.hpp"
#include "sarcbench/llm_client.hpp"
#include "sarcbench/metrics.hpp"

namespace sarcbench {

struct DatasetSpec {
  std::string name;
  std::filesystem::path path;
  Variety variety = Variety::StandardAmerican;
};

struct AgentSettings {
  int max_steps = 8;
  std::string search_backend = "fixtures";  // "live" | "fixtures"
  std::filesystem::path search_fixtures_dir = "fixtures/search";
  std::string search_url = "https://api.duckduckgo.com";
  int search_top_k = 3;
  std::size_t observation_budget = 1500;
  double kg_failure_threshold = 0.5;
};

struct RunConfig {
  std::vector<DatasetSpec> datasets;
  std::vector<Strategy> strategies;
  std::vector<EndpointConfig> models;
  EndpointConfig judge;
  EndpointConfig embedder;
  GenerationConfig generation;
  std::filesystem::path cache_dir = "cache";
  std::filesystem::path runs_dir = "runs";
  std::uint64_t seed = 0;
  int concurrency = 4;
  int resamples = 10000;
  MissingScorePolicy missing_score_policy = MissingScorePolicy::Zero;
  double failure_budget = 0.05;  // hard-failure fraction beyond which a run is degraded
  AgentSettings agent;
  std::optional<std::filesystem::path> judge_template_path;
};

/// Parse + validate a config file; throws ConfigError with a precise path
/// (e.g. "models[0].base_url") on any problem.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig run_config_from_json(const nlohmann::json& j);

/// Digest over the result-affecting parts of the config (dataset contents,
/// strategies, model ids, generation settings, seed, policies). Endpoint
/// URLs, keys, timeouts and concurrency are excluded so runs can resume
/// against a restarted endpoint.
std::string config_digest(const RunConfig& cfg);

struct ErrorEntry {
  std::string dataset;
  Strategy strategy = Strategy::Zero;
  std::string model_id;
  std::size_t ns = 0;
  std::size_t nc = 0;
  bool operator==(const ErrorEntry&) const = default;
};

/// The stable, reproducible part of a run's output; volatile details
/// (timestamps, cache ratios, failures) live in manifest.json only.
struct RunReport {
  std::string config_digest;
  std::vector<std::string> model_ids;
  std::vector<MetricRow> rows;
  std::vector<ErrorEntry> error_table;
  bool operator==(const RunReport&) const = default;
};

nlohmann::json report_to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);

enum class ReportFormat { Markdown, Csv, Json };

std::optional<ReportFormat> report_format_from_code(std::string_view code);

/// Markdown: per-dataset Table-2-style blocks (2 decimals) plus a Table-3-style
/// NS/NC block; csv/json carry full precision. Origin-skipped rows render "-",
/// KG-incompatible rows render "n/a".
std::string render_report(const RunReport& report, ReportFormat format);

struct SampleFailure {
  std::string dataset;
  Strategy strategy = Strategy::Zero;
  std::string model_id;
  std::string sample_id;
  std::string error;
};

struct RunManifest {
  std::string config_digest;
  std::string created_at;
  std::string finished_at;
  std::vector<std::string> model_ids;
  std::string judge_model;
  std::string embedder_model;
  GenerationConfig generation;
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
  double cache_hit_ratio = 0.0;
  std::size_t total_samples = 0;
  std::size_t skipped_non_sarcastic = 0;
  std::size_t judge_failures = 0;
  std::vector<SampleFailure> failures;
  std::vector<std::string> warnings;
  bool degraded = false;
  bool interrupted = false;
};

nlohmann::json manifest_to_json(const RunManifest& manifest);

struct RunOptions {
  bool offline = false;
  bool resume = false;
  std::optional<std::filesystem::path> run_dir_override;
  /// Test hook: stop scheduling new samples once this many have completed.
  std::optional<std::size_t> interrupt_after;
  int backoff_base_ms = 500;
};

struct RunOutcome {
  RunReport report;
  RunManifest manifest;
  std::filesystem::path run_dir;
  bool interrupted = false;
};

/// Execute the full experiment grid. Per-sample failures are recorded in the
/// manifest without aborting; only config problems abort.
RunOutcome run_experiment(const RunConfig& cfg, const RunOptions& options = {});

/// Complete a prior partial run (same config digest); the final report equals
/// an uninterrupted run's. Throws ConfigDigestMismatchError when no matching
/// run directory exists.
RunOutcome resume_run(const RunConfig& cfg, RunOptions options = {});

/// Load the persisted report.json from a run directory (for the report CLI).
RunReport load_report(const std::filesystem::path& run_dir);

}  // namespace sarcbench
