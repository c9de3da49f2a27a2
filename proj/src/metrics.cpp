#include "sarcbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <regex>

#include "sarcbench/errors.hpp"
#include "sarcbench/util.hpp"

namespace sarcbench {

using nlohmann::json;

json sample_score_to_json(const SampleScore& s) {
  json j = verdict_to_json(s.verdict);
  j["sample_id"] = s.sample_id;
  j["similarity"] = s.similarity ? json(*s.similarity) : json(nullptr);
  j["judge"] = s.judge ? json(*s.judge) : json(nullptr);
  j["judge_failed"] = s.judge_failed;
  return j;
}

SampleScore sample_score_from_json(const json& j) {
  SampleScore s;
  s.sample_id = j.at("sample_id").get<std::string>();
  s.verdict = verdict_from_json(j);
  if (j.contains("similarity") && !j["similarity"].is_null())
    s.similarity = j["similarity"].get<double>();
  if (j.contains("judge") && !j["judge"].is_null()) s.judge = j["judge"].get<int>();
  s.judge_failed = j.value("judge_failed", false);
  return s;
}

std::string row_status_name(RowStatus s) {
  switch (s) {
    case RowStatus::Ok: return "ok";
    case RowStatus::OriginSkipped: return "origin_skipped";
    case RowStatus::KgIncompatible: return "kg_incompatible";
  }
  return "ok";
}

namespace {

RowStatus row_status_from_name(const std::string& name) {
  if (name == "ok") return RowStatus::Ok;
  if (name == "origin_skipped") return RowStatus::OriginSkipped;
  if (name == "kg_incompatible") return RowStatus::KgIncompatible;
  throw Error("unknown row status '" + name + "'");
}

}  // namespace

json metric_row_to_json(const MetricRow& row) {
  json j;
  j["dataset"] = row.dataset;
  j["strategy"] = strategy_code(row.strategy);
  j["model"] = row.model_id;
  j["status"] = row_status_name(row.status);
  j["n"] = row.n;
  j["accuracy"] = row.accuracy;
  j["similarity"] = row.similarity;
  j["judge"] = row.judge;
  j["ns"] = row.ns_count;
  j["nc"] = row.nc_count;
  j["judge_failures"] = row.judge_failures;
  j["p_vs_zero"] = row.p_vs_zero ? json(*row.p_vs_zero) : json(nullptr);
  return j;
}

MetricRow metric_row_from_json(const json& j) {
  MetricRow row;
  row.dataset = j.at("dataset").get<std::string>();
  auto strategy = strategy_from_code(j.at("strategy").get<std::string>());
  if (!strategy) throw Error("unknown strategy in metric row");
  row.strategy = *strategy;
  row.model_id = j.at("model").get<std::string>();
  row.status = row_status_from_name(j.at("status").get<std::string>());
  row.n = j.at("n").get<std::size_t>();
  row.accuracy = j.at("accuracy").get<double>();
  row.similarity = j.at("similarity").get<double>();
  row.judge = j.at("judge").get<double>();
  row.ns_count = j.at("ns").get<std::size_t>();
  row.nc_count = j.at("nc").get<std::size_t>();
  row.judge_failures = j.value("judge_failures", std::size_t{0});
  if (j.contains("p_vs_zero") && !j["p_vs_zero"].is_null())
    row.p_vs_zero = j["p_vs_zero"].get<double>();
  return row;
}

double accuracy(std::span<const Verdict> verdicts) {
  if (verdicts.empty()) throw EmptyInputError();
  std::size_t sarcastic = 0;
  for (const auto& v : verdicts) {
    if (v.kind == VerdictKind::Sarcastic) sarcastic++;
  }
  return static_cast<double>(sarcastic) / static_cast<double>(verdicts.size());
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size() || u.empty()) {
    throw DimensionMismatchError("cosine similarity needs equal non-empty dimensions (" +
                                 std::to_string(u.size()) + " vs " + std::to_string(v.size()) +
                                 ")");
  }
  double dot = 0, uu = 0, vv = 0;
  for (std::size_t i = 0; i < u.size(); i++) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw ZeroVectorError();
  return dot / (std::sqrt(uu) * std::sqrt(vv));
}

std::pair<std::size_t, std::size_t> error_counts(std::span<const Verdict> verdicts) {
  std::size_t ns = 0, nc = 0;
  for (const auto& v : verdicts) {
    if (v.kind == VerdictKind::NotSarcastic) ns++;
    if (v.kind == VerdictKind::NeedContext) nc++;
  }
  return {ns, nc};
}

double paired_permutation_test(std::span<const double> a, std::span<const double> b,
                               int resamples, std::uint64_t seed) {
  if (a.size() != b.size()) throw LengthMismatchError(a.size(), b.size());
  if (a.empty()) throw EmptyInputError();

  const std::size_t n = a.size();
  std::vector<double> d(n);
  double sum = 0;
  for (std::size_t i = 0; i < n; i++) {
    d[i] = a[i] - b[i];
    sum += d[i];
  }
  const double t_obs = std::abs(sum);
  const double eps = 1e-12;

  if (n <= 20) {
    const std::uint64_t total = 1ULL << n;
    std::uint64_t count = 0;
    for (std::uint64_t mask = 0; mask < total; mask++) {
      double t = 0;
      for (std::size_t i = 0; i < n; i++) {
        t += (mask >> i) & 1 ? -d[i] : d[i];
      }
      if (std::abs(t) >= t_obs - eps) count++;
    }
    return static_cast<double>(count) / static_cast<double>(total);
  }

  std::mt19937_64 rng(seed);
  std::uint64_t count = 0;
  for (int r = 0; r < resamples; r++) {
    double t = 0;
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < n; i++) {
      if (i % 64 == 0) bits = rng();
      t += (bits >> (i % 64)) & 1 ? -d[i] : d[i];
    }
    if (std::abs(t) >= t_obs - eps) count++;
  }
  return static_cast<double>(1 + count) / static_cast<double>(resamples + 1);
}

const JudgeTemplate& default_judge_template() {
  static const JudgeTemplate tpl = {
      "You are an impartial evaluator of sarcasm explanations. Given a sarcastic text, the "
      "ground truth explanation, and a generated explanation, assign a score from 0 to 5 using "
      "this scoring criterion:\n"
      "0: Irrelevant or incoherent explanation\n"
      "1: Barely related, vague or generic statement\n"
      "2: Somewhat related but incomplete or unclear reasoning\n"
      "3: Reasonable explanation, covers core sarcastic cue\n"
      "4: Strong explanation with appropriate contextual grounding\n"
      "5: Excellent explanation, highly aligned with human interpretation\n"
      "Reply with the score as a single integer.",
      "Text: {text}\n"
      "Ground truth explanation: {gold}\n"
      "Generated explanation: {generated}\n"
      "Score:"};
  return tpl;
}

JudgeTemplate load_judge_template(const std::filesystem::path& path) {
  auto content = read_file(path);
  auto lines = split_lines(content);
  JudgeTemplate tpl;
  std::string* target = &tpl.system;
  bool saw_separator = false;
  for (const auto& line : lines) {
    if (!saw_separator && trim(line) == "---") {
      saw_separator = true;
      target = &tpl.user;
      continue;
    }
    if (!target->empty()) target->push_back('\n');
    *target += line;
  }
  tpl.system = trim(tpl.system);
  tpl.user = trim(tpl.user);
  if (tpl.user.empty()) tpl.user = default_judge_template().user;
  if (tpl.system.empty()) throw Error("judge template has no system text: " + path.string());
  return tpl;
}

PromptBundle build_judge_bundle(const JudgeTemplate& tpl, const Sample& sample,
                                const std::string& generated) {
  auto substitute = [&](std::string text) {
    text = replace_all(std::move(text), "{text}", sample.text);
    text = replace_all(std::move(text), "{gold}", sample.gold_explanation);
    text = replace_all(std::move(text), "{generated}", generated);
    return text;
  };
  PromptBundle bundle;
  bundle.strategy = Strategy::Zero;
  bundle.messages.push_back({Role::System, substitute(tpl.system)});
  bundle.messages.push_back({Role::User, substitute(tpl.user)});
  return bundle;
}

std::optional<int> parse_judge_reply(const std::string& reply) {
  static const std::regex re(R"(-?\d+)");
  std::smatch m;
  if (!std::regex_search(reply, m, re)) return std::nullopt;
  try {
    long value = std::stol(m.str());
    if (value >= 0 && value <= 5) return static_cast<int>(value);
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

int judge_score(LlmClient& client, const Sample& sample, const std::string& generated,
                const EndpointConfig& judge_ep, const JudgeTemplate& tpl) {
  if (generated.empty()) throw Error("cannot judge an empty explanation");

  PromptBundle bundle = build_judge_bundle(tpl, sample, generated);
  GenerationConfig cfg;
  cfg.temperature = 0.0;  // deterministic judging

  std::string last_reply;
  for (int attempt = 0; attempt < 3; attempt++) {
    Completion completion = client.complete_salted(bundle, cfg, judge_ep, attempt);
    last_reply = completion.text;
    if (auto score = parse_judge_reply(completion.text)) return *score;
  }
  throw JudgeFailureError("unparsable judge reply after 2 retries: " +
                          last_reply.substr(0, 120));
}

MetricRow aggregate(const std::string& dataset, Strategy strategy, const std::string& model_id,
                    std::vector<SampleScore> run, const std::vector<SampleScore>* zero_baseline,
                    const AggregateOptions& options) {
  if (run.empty()) throw EmptyInputError();

  // Stable order regardless of completion order.
  std::sort(run.begin(), run.end(),
            [](const SampleScore& a, const SampleScore& b) { return a.sample_id < b.sample_id; });

  MetricRow row;
  row.dataset = dataset;
  row.strategy = strategy;
  row.model_id = model_id;
  row.n = run.size();

  double sim_sum = 0;
  double judge_sum = 0;
  std::size_t sarcastic = 0, judged = 0;
  for (const auto& s : run) {
    switch (s.verdict.kind) {
      case VerdictKind::NotSarcastic: row.ns_count++; break;
      case VerdictKind::NeedContext: row.nc_count++; break;
      case VerdictKind::Sarcastic:
        sarcastic++;
        if (s.similarity) sim_sum += *s.similarity;
        if (s.judge) {
          judge_sum += static_cast<double>(*s.judge);
          judged++;
        }
        break;
    }
    if (s.judge_failed) row.judge_failures++;
  }

  row.accuracy = static_cast<double>(sarcastic) / static_cast<double>(row.n);

  if (options.policy == MissingScorePolicy::Zero) {
    // D-1: NS/NC verdicts contribute 0; judge failures drop out of the mean.
    const auto sim_denom = row.n;
    const auto judge_denom = row.n - row.judge_failures;
    row.similarity = sim_denom ? sim_sum / static_cast<double>(sim_denom) : 0.0;
    row.judge = judge_denom ? judge_sum / static_cast<double>(judge_denom) : 0.0;
  } else {
    row.similarity = sarcastic ? sim_sum / static_cast<double>(sarcastic) : 0.0;
    row.judge = judged ? judge_sum / static_cast<double>(judged) : 0.0;
  }

  if (zero_baseline && !zero_baseline->empty()) {
    std::map<std::string, double> baseline_correct;
    for (const auto& s : *zero_baseline) {
      baseline_correct[s.sample_id] = s.verdict.kind == VerdictKind::Sarcastic ? 1.0 : 0.0;
    }
    std::vector<double> a, b;
    a.reserve(run.size());
    b.reserve(run.size());
    for (const auto& s : run) {
      auto it = baseline_correct.find(s.sample_id);
      if (it == baseline_correct.end()) throw LengthMismatchError(run.size(), zero_baseline->size());
      a.push_back(s.verdict.kind == VerdictKind::Sarcastic ? 1.0 : 0.0);
      b.push_back(it->second);
    }
    row.p_vs_zero = paired_permutation_test(a, b, options.resamples, options.seed);
  }
  return row;
}

}  // namespace sarcbench
