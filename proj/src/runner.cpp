#include "sarcbench/runner.hpp"

#include <algorithm>
#include <atomic>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "sarcbench/errors.hpp"
#include "sarcbench/search.hpp"
#include "sarcbench/util.hpp"
#include "sarcbench/verdict.hpp"

namespace sarcbench {

using nlohmann::json;

namespace {

std::string iso_now() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

struct Cell {
  std::size_t dataset_idx = 0;
  std::size_t model_idx = 0;
  Strategy strategy = Strategy::Zero;
  RowStatus status = RowStatus::Ok;
  std::string file_stem;  // <dataset>_<strategy>_<model>
};

struct Task {
  std::size_t cell_idx;
  std::size_t sample_idx;
};

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::vector<json> out;
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return out;
  std::ifstream in(path, std::ios::binary);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error&) {
      // A torn final line from an interrupted run is re-scored on resume.
    }
  }
  return out;
}

void append_jsonl_line(std::mutex& m, const std::filesystem::path& path, const json& j) {
  std::lock_guard lock(m);
  std::ofstream out(path, std::ios::binary | std::ios::app);
  out << j.dump() << "\n";
  out.flush();
}

}  // namespace

RunOutcome run_experiment(const RunConfig& cfg, const RunOptions& options) {
  const std::string digest = config_digest(cfg);
  const std::filesystem::path run_dir =
      options.run_dir_override ? *options.run_dir_override : cfg.runs_dir / digest;
  const auto scores_dir = run_dir / "scores";
  const auto traces_dir = run_dir / "traces";
  const auto manifest_path = run_dir / "manifest.json";

  if (options.resume) {
    std::error_code ec;
    if (!std::filesystem::exists(manifest_path, ec)) throw ConfigDigestMismatchError(digest);
    json prior = json::parse(read_file(manifest_path));
    if (prior.value("config_digest", "") != digest) throw ConfigDigestMismatchError(digest);
  } else {
    std::error_code ec;
    std::filesystem::remove_all(scores_dir, ec);
    std::filesystem::remove_all(traces_dir, ec);
  }
  std::filesystem::create_directories(scores_dir);
  std::filesystem::create_directories(traces_dir);

  RunManifest manifest;
  manifest.config_digest = digest;
  manifest.created_at = iso_now();
  manifest.generation = cfg.generation;
  manifest.judge_model = cfg.judge.model_id;
  manifest.embedder_model = cfg.embedder.model_id;
  for (const auto& m : cfg.models) manifest.model_ids.push_back(m.model_id);

  // Datasets, restricted to in-scope (sarcastic) samples.
  std::vector<std::vector<Sample>> datasets;
  for (const auto& spec : cfg.datasets) {
    Dataset ds = load_dataset(spec.path, spec.variety, spec.name);
    std::vector<Sample> sarcastic;
    for (auto& s : ds.samples) {
      if (s.is_sarcastic()) {
        sarcastic.push_back(std::move(s));
      } else {
        manifest.skipped_non_sarcastic++;
      }
    }
    if (sarcastic.empty())
      throw ConfigError("$.datasets", "dataset '" + spec.name + "' has no sarcastic samples");
    if (sarcastic.size() != ds.samples.size()) {
      manifest.warnings.push_back("dataset '" + spec.name + "': skipped " +
                                  std::to_string(ds.samples.size() - sarcastic.size()) +
                                  " non-sarcastic samples");
    }
    datasets.push_back(std::move(sarcastic));
  }

  const JudgeTemplate judge_tpl = cfg.judge_template_path
                                      ? load_judge_template(*cfg.judge_template_path)
                                      : default_judge_template();

  std::shared_ptr<SearchProvider> search_provider;
  if (cfg.agent.search_backend == "fixtures") {
    search_provider = std::make_shared<FixtureSearchProvider>(cfg.agent.search_fixtures_dir);
  } else {
    search_provider = std::make_shared<HttpSearchProvider>(cfg.agent.search_url);
  }
  ToolRegistry tools;
  tools.register_tool("Search",
                      make_search_tool(search_provider, SearchOptions{cfg.agent.search_top_k,
                                                                      cfg.agent.observation_budget}));

  LlmClient client({cfg.cache_dir, options.offline, options.backoff_base_ms});

  // One cell per (dataset x model x strategy); origin over standard-American
  // datasets is skipped up front and rendered "-".
  std::vector<Cell> cells;
  for (std::size_t d = 0; d < cfg.datasets.size(); d++) {
    for (std::size_t m = 0; m < cfg.models.size(); m++) {
      for (Strategy strategy : cfg.strategies) {
        Cell cell;
        cell.dataset_idx = d;
        cell.model_idx = m;
        cell.strategy = strategy;
        cell.file_stem = slugify(cfg.datasets[d].name) + "_" + strategy_code(strategy) + "_" +
                         slugify(cfg.models[m].model_id);
        if (strategy == Strategy::Origin &&
            cfg.datasets[d].variety == Variety::StandardAmerican) {
          cell.status = RowStatus::OriginSkipped;
        }
        cells.push_back(std::move(cell));
      }
    }
  }

  // Previously persisted scores (resume) keyed by sample id.
  std::vector<std::map<std::string, SampleScore>> done(cells.size());
  if (options.resume) {
    for (std::size_t c = 0; c < cells.size(); c++) {
      for (const auto& j : read_jsonl(scores_dir / (cells[c].file_stem + ".jsonl"))) {
        try {
          SampleScore score = sample_score_from_json(j);
          done[c].emplace(score.sample_id, std::move(score));
        } catch (const std::exception&) {
        }
      }
    }
  }

  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cells.size(); c++) {
    if (cells[c].status != RowStatus::Ok) continue;
    const auto& samples = datasets[cells[c].dataset_idx];
    for (std::size_t s = 0; s < samples.size(); s++) {
      if (!done[c].count(samples[s].id)) tasks.push_back({c, s});
    }
  }

  const std::size_t task_limit = std::min<std::size_t>(
      tasks.size(), options.interrupt_after ? *options.interrupt_after : tasks.size());
  const bool interrupted = task_limit < tasks.size();

  std::mutex sink_mutex;
  std::mutex file_mutex;
  std::atomic<std::size_t> next_task{0};

  auto evaluate = [&](const Cell& cell, const Sample& sample) {
    const auto& model_ep = cfg.models[cell.model_idx];
    SampleScore score;
    score.sample_id = sample.id;
    score.verdict = Verdict::need_context();
    std::optional<std::string> hard_error;

    try {
      std::string completion_text;
      if (cell.strategy == Strategy::Kg) {
        AgentOptions agent_options;
        agent_options.max_steps = cfg.agent.max_steps;
        AgentTrace trace =
            run_agent(client, sample, tools, model_ep, cfg.generation, agent_options);
        append_jsonl_line(file_mutex, traces_dir / (cell.file_stem + ".jsonl"),
                          trace_to_json(trace));
        if (trace.outcome.kind == OutcomeKind::FinalAnswer) {
          completion_text = trace.outcome.text;
        } else {
          // Failed episodes score as NeedContext; compatibility is judged later.
          completion_text = "";
        }
      } else {
        PromptBundle bundle = build_prompt(cell.strategy, sample);
        completion_text = client.complete(bundle, cfg.generation, model_ep).text;
      }

      if (!trim(completion_text).empty()) {
        score.verdict = parse_verdict(completion_text, cell.strategy);
      }

      if (score.verdict.kind == VerdictKind::Sarcastic) {
        try {
          auto gold_vec = client.embed(sample.gold_explanation, cfg.embedder);
          auto gen_vec = client.embed(score.verdict.explanation, cfg.embedder);
          score.similarity = cosine_similarity(gold_vec, gen_vec);
        } catch (const Error& e) {
          hard_error = std::string("embedding failed: ") + e.what();
        }
        try {
          score.judge =
              judge_score(client, sample, score.verdict.explanation, cfg.judge, judge_tpl);
        } catch (const JudgeFailureError&) {
          score.judge_failed = true;
        } catch (const Error& e) {
          hard_error = std::string("judge call failed: ") + e.what();
        }
      }
    } catch (const Error& e) {
      score.verdict = Verdict::need_context();
      hard_error = e.what();
    }

    {
      std::lock_guard lock(sink_mutex);
      if (hard_error) {
        manifest.failures.push_back({cfg.datasets[cell.dataset_idx].name, cell.strategy,
                                     model_ep.model_id, sample.id, *hard_error});
      }
    }
    return score;
  };

  auto worker = [&] {
    while (true) {
      std::size_t idx = next_task.fetch_add(1);
      if (idx >= task_limit) return;
      const Task& task = tasks[idx];
      const Cell& cell = cells[task.cell_idx];
      const Sample& sample = datasets[cell.dataset_idx][task.sample_idx];
      SampleScore score = evaluate(cell, sample);
      append_jsonl_line(file_mutex, scores_dir / (cell.file_stem + ".jsonl"),
                        sample_score_to_json(score));
      {
        std::lock_guard lock(sink_mutex);
        done[task.cell_idx][score.sample_id] = std::move(score);
      }
    }
  };

  {
    std::size_t thread_count =
        std::min<std::size_t>(static_cast<std::size_t>(std::max(1, cfg.concurrency)), task_limit);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < thread_count; t++) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  manifest.cache_hits = client.stats().cache_hits.load();
  manifest.cache_misses = client.stats().cache_misses.load();
  manifest.cache_hit_ratio = client.stats().hit_ratio();
  for (const auto& d : datasets) manifest.total_samples += d.size();
  manifest.interrupted = interrupted;
  manifest.finished_at = iso_now();

  RunOutcome outcome;
  outcome.run_dir = run_dir;
  outcome.interrupted = interrupted;

  if (interrupted) {
    atomic_write_file(manifest_path, manifest_to_json(manifest).dump(2) + "\n");
    outcome.manifest = manifest;
    return outcome;
  }

  // Aggregate in deterministic (config) order.
  RunReport report;
  report.config_digest = digest;
  report.model_ids = manifest.model_ids;

  AggregateOptions agg;
  agg.policy = cfg.missing_score_policy;
  agg.resamples = cfg.resamples;
  agg.seed = cfg.seed;

  // Zero-strategy baselines per (dataset, model) for significance testing.
  std::map<std::pair<std::size_t, std::size_t>, std::vector<SampleScore>> baselines;
  for (std::size_t c = 0; c < cells.size(); c++) {
    if (cells[c].strategy != Strategy::Zero || cells[c].status != RowStatus::Ok) continue;
    std::vector<SampleScore> scores;
    for (const auto& [_, s] : done[c]) scores.push_back(s);
    baselines[{cells[c].dataset_idx, cells[c].model_idx}] = std::move(scores);
  }

  std::size_t judge_failures_total = 0;
  for (std::size_t c = 0; c < cells.size(); c++) {
    const Cell& cell = cells[c];
    const auto& spec = cfg.datasets[cell.dataset_idx];
    const auto& model_id = cfg.models[cell.model_idx].model_id;

    MetricRow row;
    if (cell.status == RowStatus::OriginSkipped) {
      row.dataset = spec.name;
      row.strategy = cell.strategy;
      row.model_id = model_id;
      row.status = RowStatus::OriginSkipped;
      row.n = datasets[cell.dataset_idx].size();
      report.rows.push_back(std::move(row));
      continue;
    }

    std::vector<SampleScore> scores;
    for (const auto& [_, s] : done[c]) scores.push_back(s);

    bool incompatible = false;
    if (cell.strategy == Strategy::Kg) {
      std::map<std::string, AgentTrace> traces;
      for (const auto& j : read_jsonl(traces_dir / (cell.file_stem + ".jsonl"))) {
        try {
          AgentTrace trace = trace_from_json(j);
          traces[trace.sample_id] = std::move(trace);
        } catch (const std::exception&) {
        }
      }
      std::vector<AgentTrace> trace_list;
      for (auto& [_, t] : traces) trace_list.push_back(std::move(t));
      auto verdict = kg_compatibility_check(trace_list, cfg.agent.kg_failure_threshold);
      incompatible = !verdict.compatible;
    }

    if (incompatible) {
      row.dataset = spec.name;
      row.strategy = cell.strategy;
      row.model_id = model_id;
      row.status = RowStatus::KgIncompatible;
      row.n = scores.size();
    } else {
      const std::vector<SampleScore>* baseline = nullptr;
      if (cell.strategy != Strategy::Zero) {
        auto it = baselines.find({cell.dataset_idx, cell.model_idx});
        if (it != baselines.end() && !it->second.empty()) baseline = &it->second;
      }
      row = aggregate(spec.name, cell.strategy, model_id, scores, baseline, agg);
      judge_failures_total += row.judge_failures;
      report.error_table.push_back({spec.name, cell.strategy, model_id, row.ns_count,
                                    row.nc_count});
    }
    report.rows.push_back(std::move(row));
  }

  manifest.judge_failures = judge_failures_total;
  std::size_t evaluated = 0;
  for (const auto& cell : cells) {
    if (cell.status == RowStatus::Ok) evaluated += datasets[cell.dataset_idx].size();
  }
  manifest.degraded =
      evaluated > 0 && static_cast<double>(manifest.failures.size()) >
                           cfg.failure_budget * static_cast<double>(evaluated);

  atomic_write_file(run_dir / "report.md", render_report(report, ReportFormat::Markdown));
  atomic_write_file(run_dir / "report.csv", render_report(report, ReportFormat::Csv));
  atomic_write_file(run_dir / "report.json", render_report(report, ReportFormat::Json));
  atomic_write_file(manifest_path, manifest_to_json(manifest).dump(2) + "\n");

  outcome.report = std::move(report);
  outcome.manifest = std::move(manifest);
  return outcome;
}

RunOutcome resume_run(const RunConfig& cfg, RunOptions options) {
  options.resume = true;
  return run_experiment(cfg, options);
}

RunReport load_report(const std::filesystem::path& run_dir) {
  auto path = run_dir / "report.json";
  std::error_code ec;
  if (!std::filesystem::exists(path, ec))
    throw Error("no report.json in " + run_dir.string() + " (incomplete run?)");
  return report_from_json(json::parse(read_file(path)));
}

}  // namespace sarcbench
