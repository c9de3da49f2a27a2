#include <cstdlib>

#include "sarcbench/errors.hpp"
#include "sarcbench/runner.hpp"
#include "sarcbench/util.hpp"

namespace sarcbench {

using nlohmann::json;

namespace {

const json& require_key(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(path + "." + key, "missing required key");
  return *it;
}

std::string require_string(const json& obj, const std::string& path, const char* key) {
  const json& value = require_key(obj, path, key);
  if (!value.is_string()) throw ConfigError(path + "." + key, "expected a string");
  return value.get<std::string>();
}

std::string optional_string(const json& obj, const std::string& path, const char* key,
                            const std::string& fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_string()) throw ConfigError(path + "." + key, "expected a string");
  return it->get<std::string>();
}

double optional_number(const json& obj, const std::string& path, const char* key,
                       double fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_number()) throw ConfigError(path + "." + key, "expected a number");
  return it->get<double>();
}

std::int64_t optional_integer(const json& obj, const std::string& path, const char* key,
                              std::int64_t fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_number_integer()) throw ConfigError(path + "." + key, "expected an integer");
  return it->get<std::int64_t>();
}

bool optional_bool(const json& obj, const std::string& path, const char* key, bool fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_boolean()) throw ConfigError(path + "." + key, "expected a boolean");
  return it->get<bool>();
}

EndpointConfig endpoint_from_json(const json& obj, const std::string& path) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  EndpointConfig ep;
  ep.base_url = require_string(obj, path, "base_url");
  ep.model_id = require_string(obj, path, "model_id");
  ep.api_key_env = optional_string(obj, path, "api_key_env", "");
  if (!ep.api_key_env.empty()) {
    if (const char* key = std::getenv(ep.api_key_env.c_str())) ep.api_key = key;
  }
  ep.timeout_s = static_cast<int>(optional_integer(obj, path, "timeout_s", 60));
  if (ep.timeout_s < 1) throw ConfigError(path + ".timeout_s", "must be >= 1");
  ep.max_retries = static_cast<int>(optional_integer(obj, path, "max_retries", 3));
  if (ep.max_retries < 0) throw ConfigError(path + ".max_retries", "must be >= 0");
  ep.send_top_k = optional_bool(obj, path, "send_top_k", true);
  ep.max_in_flight = static_cast<int>(optional_integer(obj, path, "max_in_flight", 4));
  if (ep.max_in_flight < 1) throw ConfigError(path + ".max_in_flight", "must be >= 1");
  return ep;
}

GenerationConfig generation_from_config(const json& obj, const std::string& path) {
  GenerationConfig cfg;  // defaults are the paper's settings
  if (obj.is_null()) return cfg;
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  cfg.max_new_tokens = static_cast<int>(optional_integer(obj, path, "max_new_tokens", 1024));
  if (cfg.max_new_tokens < 1) throw ConfigError(path + ".max_new_tokens", "must be >= 1");
  cfg.temperature = optional_number(obj, path, "temperature", 1.0);
  if (cfg.temperature < 0) throw ConfigError(path + ".temperature", "must be >= 0");
  cfg.top_p = optional_number(obj, path, "top_p", 0.95);
  if (cfg.top_p <= 0 || cfg.top_p > 1) throw ConfigError(path + ".top_p", "must be in (0, 1]");
  cfg.top_k = static_cast<int>(optional_integer(obj, path, "top_k", 64));
  if (obj.contains("seed") && !obj["seed"].is_null()) {
    if (!obj["seed"].is_number_integer()) throw ConfigError(path + ".seed", "expected an integer");
    cfg.seed = obj["seed"].get<std::int64_t>();
  }
  return cfg;
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("$", "config root must be an object");
  RunConfig cfg;

  const json& datasets = require_key(j, "$", "datasets");
  if (!datasets.is_array() || datasets.empty())
    throw ConfigError("$.datasets", "expected a non-empty array");
  for (size_t i = 0; i < datasets.size(); i++) {
    std::string path = "$.datasets[" + std::to_string(i) + "]";
    const json& d = datasets[i];
    if (!d.is_object()) throw ConfigError(path, "expected an object");
    DatasetSpec spec;
    spec.name = require_string(d, path, "name");
    spec.path = require_string(d, path, "path");
    auto code = require_string(d, path, "variety");
    auto variety = variety_from_code(code);
    if (!variety) throw ConfigError(path + ".variety", "must be one of us|au|in");
    spec.variety = *variety;
    cfg.datasets.push_back(std::move(spec));
  }

  const json& strategies = require_key(j, "$", "strategies");
  if (!strategies.is_array() || strategies.empty())
    throw ConfigError("$.strategies", "expected a non-empty array");
  for (size_t i = 0; i < strategies.size(); i++) {
    std::string path = "$.strategies[" + std::to_string(i) + "]";
    if (!strategies[i].is_string()) throw ConfigError(path, "expected a string");
    auto strategy = strategy_from_code(strategies[i].get<std::string>());
    if (!strategy) throw ConfigError(path, "must be one of zero|few|origin|kg|pmp");
    cfg.strategies.push_back(*strategy);
  }

  const json& models = require_key(j, "$", "models");
  if (!models.is_array() || models.empty())
    throw ConfigError("$.models", "expected a non-empty array");
  for (size_t i = 0; i < models.size(); i++) {
    cfg.models.push_back(endpoint_from_json(models[i], "$.models[" + std::to_string(i) + "]"));
  }

  cfg.judge = endpoint_from_json(require_key(j, "$", "judge"), "$.judge");
  cfg.embedder = endpoint_from_json(require_key(j, "$", "embedder"), "$.embedder");
  cfg.generation = generation_from_config(j.value("generation", json(nullptr)), "$.generation");

  cfg.cache_dir = optional_string(j, "$", "cache_dir", "cache");
  cfg.runs_dir = optional_string(j, "$", "runs_dir", "runs");
  cfg.seed = static_cast<std::uint64_t>(optional_integer(j, "$", "seed", 0));
  cfg.concurrency = static_cast<int>(optional_integer(j, "$", "concurrency", 4));
  if (cfg.concurrency < 1) throw ConfigError("$.concurrency", "must be >= 1");
  cfg.resamples = static_cast<int>(optional_integer(j, "$", "resamples", 10000));
  if (cfg.resamples < 1) throw ConfigError("$.resamples", "must be >= 1");

  auto policy = optional_string(j, "$", "missing_score_policy", "zero");
  if (policy == "zero") {
    cfg.missing_score_policy = MissingScorePolicy::Zero;
  } else if (policy == "exclude") {
    cfg.missing_score_policy = MissingScorePolicy::Exclude;
  } else {
    throw ConfigError("$.missing_score_policy", "must be zero|exclude");
  }
  cfg.failure_budget = optional_number(j, "$", "failure_budget", 0.05);

  if (j.contains("agent") && !j["agent"].is_null()) {
    const json& agent = j["agent"];
    if (!agent.is_object()) throw ConfigError("$.agent", "expected an object");
    cfg.agent.max_steps = static_cast<int>(optional_integer(agent, "$.agent", "max_steps", 8));
    if (cfg.agent.max_steps < 1) throw ConfigError("$.agent.max_steps", "must be >= 1");
    cfg.agent.search_backend = optional_string(agent, "$.agent", "search_backend", "fixtures");
    if (cfg.agent.search_backend != "live" && cfg.agent.search_backend != "fixtures")
      throw ConfigError("$.agent.search_backend", "must be live|fixtures");
    cfg.agent.search_fixtures_dir =
        optional_string(agent, "$.agent", "search_fixtures_dir", "fixtures/search");
    cfg.agent.search_url =
        optional_string(agent, "$.agent", "search_url", "https://api.duckduckgo.com");
    cfg.agent.search_top_k =
        static_cast<int>(optional_integer(agent, "$.agent", "search_top_k", 3));
    if (cfg.agent.search_top_k < 1) throw ConfigError("$.agent.search_top_k", "must be >= 1");
    cfg.agent.observation_budget = static_cast<std::size_t>(
        optional_integer(agent, "$.agent", "observation_budget", 1500));
    cfg.agent.kg_failure_threshold =
        optional_number(agent, "$.agent", "kg_failure_threshold", 0.5);
    if (cfg.agent.kg_failure_threshold < 0 || cfg.agent.kg_failure_threshold > 1)
      throw ConfigError("$.agent.kg_failure_threshold", "must be in [0, 1]");
  }

  auto judge_template = optional_string(j, "$", "judge_template", "");
  if (!judge_template.empty()) cfg.judge_template_path = judge_template;

  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string content;
  try {
    content = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("$", e.what());
  }
  json j;
  try {
    j = json::parse(content);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("invalid JSON: ") + e.what());
  }
  return run_config_from_json(j);
}

std::string config_digest(const RunConfig& cfg) {
  json j;
  json datasets = json::array();
  for (const auto& spec : cfg.datasets) {
    std::string file_hash;
    try {
      file_hash = sha256_hex(read_file(spec.path));
    } catch (const std::exception& e) {
      throw ConfigError("$.datasets", std::string("cannot hash dataset file: ") + e.what());
    }
    datasets.push_back(
        {{"name", spec.name}, {"variety", variety_code(spec.variety)}, {"sha256", file_hash}});
  }
  j["datasets"] = datasets;
  json strategies = json::array();
  for (auto s : cfg.strategies) strategies.push_back(strategy_code(s));
  j["strategies"] = strategies;
  json models = json::array();
  for (const auto& m : cfg.models)
    models.push_back({{"model_id", m.model_id}, {"send_top_k", m.send_top_k}});
  j["models"] = models;
  j["judge_model"] = cfg.judge.model_id;
  j["embedder_model"] = cfg.embedder.model_id;
  j["generation"] = generation_to_json(cfg.generation);
  j["seed"] = cfg.seed;
  j["resamples"] = cfg.resamples;
  j["missing_score_policy"] =
      cfg.missing_score_policy == MissingScorePolicy::Zero ? "zero" : "exclude";
  j["agent"] = {{"max_steps", cfg.agent.max_steps},
                {"search_backend", cfg.agent.search_backend},
                {"search_top_k", cfg.agent.search_top_k},
                {"observation_budget", cfg.agent.observation_budget},
                {"kg_failure_threshold", cfg.agent.kg_failure_threshold}};
  if (cfg.judge_template_path) {
    j["judge_template_sha256"] = sha256_hex(read_file(*cfg.judge_template_path));
  } else {
    j["judge_template_sha256"] = nullptr;
  }
  return sha256_hex(j.dump()).substr(0, 16);
}

}  // namespace sarcbench
