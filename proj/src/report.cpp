#include "sarcbench/runner.hpp"
#include "sarcbench/util.hpp"

namespace sarcbench {

using nlohmann::json;

json report_to_json(const RunReport& report) {
  json j;
  j["config_digest"] = report.config_digest;
  j["model_ids"] = report.model_ids;
  json rows = json::array();
  for (const auto& row : report.rows) rows.push_back(metric_row_to_json(row));
  j["rows"] = rows;
  json errors = json::array();
  for (const auto& e : report.error_table) {
    errors.push_back({{"dataset", e.dataset},
                      {"strategy", strategy_code(e.strategy)},
                      {"model", e.model_id},
                      {"ns", e.ns},
                      {"nc", e.nc}});
  }
  j["error_table"] = errors;
  return j;
}

RunReport report_from_json(const json& j) {
  RunReport report;
  report.config_digest = j.at("config_digest").get<std::string>();
  report.model_ids = j.at("model_ids").get<std::vector<std::string>>();
  for (const auto& row : j.at("rows")) report.rows.push_back(metric_row_from_json(row));
  for (const auto& e : j.at("error_table")) {
    ErrorEntry entry;
    entry.dataset = e.at("dataset").get<std::string>();
    entry.strategy = *strategy_from_code(e.at("strategy").get<std::string>());
    entry.model_id = e.at("model").get<std::string>();
    entry.ns = e.at("ns").get<std::size_t>();
    entry.nc = e.at("nc").get<std::size_t>();
    report.error_table.push_back(std::move(entry));
  }
  return report;
}

std::optional<ReportFormat> report_format_from_code(std::string_view code) {
  if (code == "md" || code == "markdown") return ReportFormat::Markdown;
  if (code == "csv") return ReportFormat::Csv;
  if (code == "json") return ReportFormat::Json;
  return std::nullopt;
}

namespace {

// Table-2 conventions: "-" for origin on a standard-American dataset,
// "n/a" when KG was incompatible with the model.
std::string metric_cell(const MetricRow& row, double value, int decimals) {
  switch (row.status) {
    case RowStatus::OriginSkipped: return "-";
    case RowStatus::KgIncompatible: return "n/a";
    case RowStatus::Ok: return format_fixed(value, decimals);
  }
  return "-";
}

std::string csv_cell(const MetricRow& row, double value) {
  if (row.status != RowStatus::Ok) return "";
  return format_full(value);
}

std::string render_markdown(const RunReport& report) {
  std::string out;
  out += "# Run report\n\n";
  out += "Config digest: `" + report.config_digest + "`\n";

  for (const auto& model : report.model_ids) {
    // Preserve row order (config order) while grouping by dataset.
    std::vector<std::string> datasets;
    for (const auto& row : report.rows) {
      if (row.model_id != model) continue;
      if (std::find(datasets.begin(), datasets.end(), row.dataset) == datasets.end())
        datasets.push_back(row.dataset);
    }
    for (const auto& dataset : datasets) {
      out += "\n## " + dataset + " — " + model + "\n\n";
      out += "| strategy | accuracy | similarity | judge |\n";
      out += "|---|---|---|---|\n";
      for (const auto& row : report.rows) {
        if (row.model_id != model || row.dataset != dataset) continue;
        out += "| " + strategy_code(row.strategy);
        out += " | " + metric_cell(row, row.accuracy, 2);
        out += " | " + metric_cell(row, row.similarity, 2);
        out += " | " + metric_cell(row, row.judge, 2);
        out += " |\n";
      }
    }
  }

  out += "\n## Error counts\n\n";
  out += "| dataset | strategy | model | ns | nc |\n";
  out += "|---|---|---|---|---|\n";
  for (const auto& e : report.error_table) {
    out += "| " + e.dataset + " | " + strategy_code(e.strategy) + " | " + e.model_id + " | " +
           std::to_string(e.ns) + " | " + std::to_string(e.nc) + " |\n";
  }
  return out;
}

std::string render_csv(const RunReport& report) {
  std::string out =
      "dataset,strategy,model,status,n,accuracy,similarity,judge,ns,nc,judge_failures,"
      "p_vs_zero\n";
  for (const auto& row : report.rows) {
    out += row.dataset + "," + strategy_code(row.strategy) + "," + row.model_id + "," +
           row_status_name(row.status) + "," + std::to_string(row.n);
    out += "," + csv_cell(row, row.accuracy);
    out += "," + csv_cell(row, row.similarity);
    out += "," + csv_cell(row, row.judge);
    if (row.status == RowStatus::Ok) {
      out += "," + std::to_string(row.ns_count) + "," + std::to_string(row.nc_count) + "," +
             std::to_string(row.judge_failures);
      out += "," + (row.p_vs_zero ? format_full(*row.p_vs_zero) : std::string());
    } else {
      out += ",,,,";
    }
    out += "\n";
  }
  return out;
}

}  // namespace

std::string render_report(const RunReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Markdown: return render_markdown(report);
    case ReportFormat::Csv: return render_csv(report);
    case ReportFormat::Json: return report_to_json(report).dump(2) + "\n";
  }
  return "";
}

json manifest_to_json(const RunManifest& manifest) {
  json j;
  j["config_digest"] = manifest.config_digest;
  j["created_at"] = manifest.created_at;
  j["finished_at"] = manifest.finished_at;
  j["model_ids"] = manifest.model_ids;
  j["judge_model"] = manifest.judge_model;
  j["embedder_model"] = manifest.embedder_model;
  j["generation"] = generation_to_json(manifest.generation);
  j["cache"] = {{"hits", manifest.cache_hits},
                {"misses", manifest.cache_misses},
                {"hit_ratio", manifest.cache_hit_ratio}};
  j["total_samples"] = manifest.total_samples;
  j["skipped_non_sarcastic"] = manifest.skipped_non_sarcastic;
  j["judge_failures"] = manifest.judge_failures;
  json failures = json::array();
  for (const auto& f : manifest.failures) {
    failures.push_back({{"dataset", f.dataset},
                        {"strategy", strategy_code(f.strategy)},
                        {"model", f.model_id},
                        {"sample_id", f.sample_id},
                        {"error", f.error}});
  }
  j["failures"] = failures;
  j["warnings"] = manifest.warnings;
  j["degraded"] = manifest.degraded;
  j["interrupted"] = manifest.interrupted;
  return j;
}

}  // namespace sarcbench
