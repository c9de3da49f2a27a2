#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "sarcbench/errors.hpp"
#include "sarcbench/runner.hpp"
#include "sarcbench/util.hpp"
#include "sarcbench/verdict.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitDegraded = 3;

int cmd_run(const std::string& config_path, bool resume, bool offline,
            const std::optional<int>& max_steps, const std::optional<std::string>& search_backend,
            const std::optional<std::string>& judge_template) {
  sarcbench::RunConfig cfg = sarcbench::load_run_config(config_path);
  if (max_steps) cfg.agent.max_steps = *max_steps;
  if (search_backend) {
    if (*search_backend != "live" && *search_backend != "fixtures")
      throw sarcbench::ConfigError("--search-backend", "must be live|fixtures");
    cfg.agent.search_backend = *search_backend;
  }
  if (judge_template) cfg.judge_template_path = *judge_template;

  sarcbench::RunOptions options;
  options.offline = offline;
  options.resume = resume;
  auto outcome = sarcbench::run_experiment(cfg, options);

  std::cout << sarcbench::render_report(outcome.report, sarcbench::ReportFormat::Markdown);
  std::cout << "\nrun directory: " << outcome.run_dir.string() << "\n";
  if (outcome.manifest.degraded) {
    std::cerr << "warning: run degraded (" << outcome.manifest.failures.size()
              << " per-sample failures)\n";
    return kExitDegraded;
  }
  return kExitOk;
}

int cmd_stats(const std::string& dataset_path) {
  auto ds = sarcbench::load_dataset(dataset_path);
  auto stats = sarcbench::dataset_stats(ds);
  std::cout << "| subset | samples | text | expl |\n";
  std::cout << "|---|---|---|---|\n";
  std::cout << "| " << ds.name << " | " << stats.n << " | "
            << sarcbench::format_fixed(stats.avg_text_words, 1) << " | "
            << sarcbench::format_fixed(stats.avg_expl_words, 1) << " |\n";
  return kExitOk;
}

int cmd_report(const std::string& run_dir, const std::string& format_code) {
  auto format = sarcbench::report_format_from_code(format_code);
  if (!format) throw sarcbench::ConfigError("--format", "must be md|csv|json");
  auto report = sarcbench::load_report(run_dir);
  std::cout << sarcbench::render_report(report, *format);
  return kExitOk;
}

int cmd_parse(const std::string& strategy_code) {
  auto strategy = sarcbench::strategy_from_code(strategy_code);
  if (!strategy) throw sarcbench::ConfigError("--strategy", "must be zero|few|origin|kg|pmp");
  std::ostringstream buffer;
  buffer << std::cin.rdbuf();
  auto verdict = sarcbench::parse_verdict(buffer.str(), *strategy);
  std::cout << sarcbench::verdict_to_json(verdict).dump(2) << "\n";
  return kExitOk;
}

int cmd_explain_prompt(const std::string& strategy_code, const std::string& text,
                       const std::string& variety_code, const std::string& id) {
  auto strategy = sarcbench::strategy_from_code(strategy_code);
  if (!strategy) throw sarcbench::ConfigError("--strategy", "must be zero|few|origin|kg|pmp");
  auto variety = sarcbench::variety_from_code(variety_code);
  if (!variety) throw sarcbench::ConfigError("--variety", "must be us|au|in");

  sarcbench::Sample sample;
  sample.id = id;
  sample.text = text;
  sample.variety = *variety;
  sample.gold_label = "sarcastic";
  sample.gold_explanation = "(debug sample)";

  auto bundle = *strategy == sarcbench::Strategy::Kg
                    ? sarcbench::build_kg_initial_bundle(sample)
                    : sarcbench::build_prompt(*strategy, sample);
  std::cout << sarcbench::render_bundle(bundle) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prompt-strategy benchmark harness for explainable sarcasm detection"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Execute an experiment from a config file");
  std::string config_path;
  bool resume = false, offline = false;
  std::optional<int> max_steps;
  std::optional<std::string> search_backend, judge_template;
  run->add_option("--config", config_path, "Run config (JSON)")->required();
  run->add_flag("--resume", resume, "Complete a prior partial run with the same config digest");
  run->add_flag("--offline", offline, "Serve everything from the replay cache; no network");
  run->add_option("--max-steps", max_steps, "Agent step budget for the KG strategy");
  run->add_option("--search-backend", search_backend, "Search tool backend: live|fixtures");
  run->add_option("--judge-template", judge_template, "Override the judge prompt template file");

  // stats
  auto* stats = app.add_subcommand("stats", "Dataset summary table (samples, avg words)");
  std::string dataset_path;
  stats->add_option("--dataset", dataset_path, "JSONL dataset path")->required();

  // report
  auto* report = app.add_subcommand("report", "Re-render a persisted run report");
  std::string run_dir, format_code = "md";
  report->add_option("--from", run_dir, "Run directory (runs/<digest>)")->required();
  report->add_option("--format", format_code, "md|csv|json");

  // parse
  auto* parse = app.add_subcommand("parse", "Parse a completion from stdin into a verdict");
  std::string parse_strategy = "zero";
  parse->add_option("--strategy", parse_strategy, "Strategy the completion came from");

  // explain-prompt
  auto* explain = app.add_subcommand("explain-prompt", "Print the rendered prompt bundle");
  std::string ep_strategy, ep_text, ep_variety = "us", ep_id = "debug";
  explain->add_option("--strategy", ep_strategy, "zero|few|origin|kg|pmp")->required();
  explain->add_option("--text", ep_text, "Sample text")->required();
  explain->add_option("--variety", ep_variety, "us|au|in");
  explain->add_option("--id", ep_id, "Sample id");

  try {
    app.parse(argc, argv);
    if (*run) return cmd_run(config_path, resume, offline, max_steps, search_backend,
                             judge_template);
    if (*stats) return cmd_stats(dataset_path);
    if (*report) return cmd_report(run_dir, format_code);
    if (*parse) return cmd_parse(parse_strategy);
    if (*explain) return cmd_explain_prompt(ep_strategy, ep_text, ep_variety, ep_id);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfigError;
  } catch (const sarcbench::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const sarcbench::ConfigDigestMismatchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
