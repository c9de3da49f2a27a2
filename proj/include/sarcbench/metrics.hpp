#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sarcbench/dataset.hpp"
#include "sarcbench/llm_client.hpp"
#include "sarcbench/verdict.hpp"

namespace sarcbench {

struct SampleScore {
  std::string sample_id;
  Verdict verdict;
  std::optional<double> similarity;  // null iff verdict != Sarcastic
  std::optional<int> judge;          // null for non-sarcastic verdicts or judge failures
  bool judge_failed = false;

  bool operator==(const SampleScore&) const = default;
};

nlohmann::json sample_score_to_json(const SampleScore& s);
SampleScore sample_score_from_json(const nlohmann::json& j);

enum class RowStatus { Ok, OriginSkipped, KgIncompatible };

std::string row_status_name(RowStatus s);

struct MetricRow {
  std::string dataset;
  Strategy strategy = Strategy::Zero;
  std::string model_id;
  RowStatus status = RowStatus::Ok;
  std::size_t n = 0;
  double accuracy = 0.0;
  double similarity = 0.0;
  double judge = 0.0;
  std::size_t ns_count = 0;
  std::size_t nc_count = 0;
  std::size_t judge_failures = 0;
  std::optional<double> p_vs_zero;

  bool operator==(const MetricRow&) const = default;
};

nlohmann::json metric_row_to_json(const MetricRow& row);
MetricRow metric_row_from_json(const nlohmann::json& j);

/// Fraction of verdicts that are Sarcastic (gold is all-sarcastic in scope).
double accuracy(std::span<const Verdict> verdicts);

double cosine_similarity(std::span<const double> u, std::span<const double> v);

/// (#NotSarcastic, #NeedContext).
std::pair<std::size_t, std::size_t> error_counts(std::span<const Verdict> verdicts);

/// Two-sided paired sign-flip permutation test on a[i]-b[i]. Exact enumeration
/// of all 2^n sign patterns for n <= 20, otherwise seeded Monte Carlo with
/// add-one smoothing.
double paired_permutation_test(std::span<const double> a, std::span<const double> b,
                               int resamples, std::uint64_t seed);

// --- LLM judge ---

struct JudgeTemplate {
  std::string system;  // carries the 0-5 rubric
  std::string user;    // placeholders {text}, {gold}, {generated}
};

const JudgeTemplate& default_judge_template();

/// Template file: system text, a line containing only "---", then user text.
JudgeTemplate load_judge_template(const std::filesystem::path& path);

PromptBundle build_judge_bundle(const JudgeTemplate& tpl, const Sample& sample,
                                const std::string& generated);

/// First integer found in a judge reply, if it lies in 0..5.
std::optional<int> parse_judge_reply(const std::string& reply);

/// Score a generated explanation 0..5 via the judge endpoint (temperature 0).
/// Unparsable replies are retried twice; then JudgeFailureError.
int judge_score(LlmClient& client, const Sample& sample, const std::string& generated,
                const EndpointConfig& judge_ep,
                const JudgeTemplate& tpl = default_judge_template());

// --- aggregation ---

enum class MissingScorePolicy { Zero, Exclude };

struct AggregateOptions {
  MissingScorePolicy policy = MissingScorePolicy::Zero;
  int resamples = 10000;
  std::uint64_t seed = 0;
};

/// Fold per-sample scores into one row. Under the default policy NS/NC
/// verdicts contribute 0 to the similarity and judge means; judge failures are
/// excluded from the judge mean and counted. p_vs_zero is a sign-flip
/// permutation test on per-sample binary correctness, paired by sample_id.
MetricRow aggregate(const std::string& dataset, Strategy strategy, const std::string& model_id,
                    std::vector<SampleScore> run,
                    const std::vector<SampleScore>* zero_baseline = nullptr,
                    const AggregateOptions& options = {});

}  // namespace sarcbench
