#include "sarcbench/llm_client.hpp"

#include <httplib.h>

#include <chrono>
#include <thread>

#include "sarcbench/errors.hpp"
#include "sarcbench/util.hpp"

namespace sarcbench {

using nlohmann::json;

json generation_to_json(const GenerationConfig& cfg) {
  json j;
  j["max_new_tokens"] = cfg.max_new_tokens;
  j["temperature"] = cfg.temperature;
  j["top_p"] = cfg.top_p;
  j["top_k"] = cfg.top_k;
  j["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
  return j;
}

GenerationConfig generation_from_json(const json& j) {
  GenerationConfig cfg;
  if (j.contains("max_new_tokens")) cfg.max_new_tokens = j["max_new_tokens"].get<int>();
  if (j.contains("temperature")) cfg.temperature = j["temperature"].get<double>();
  if (j.contains("top_p")) cfg.top_p = j["top_p"].get<double>();
  if (j.contains("top_k")) cfg.top_k = j["top_k"].get<int>();
  if (j.contains("seed") && !j["seed"].is_null()) cfg.seed = j["seed"].get<std::int64_t>();
  return cfg;
}

std::string finish_reason_name(FinishReason r) {
  switch (r) {
    case FinishReason::Stop: return "stop";
    case FinishReason::Length: return "length";
    case FinishReason::Error: return "error";
  }
  return "error";
}

namespace {

json normalize_messages(const PromptBundle& bundle) {
  json messages = json::array();
  for (const auto& msg : bundle.messages) {
    messages.push_back({{"role", role_name(msg.role)}, {"content", msg.content}});
  }
  return messages;
}

FinishReason finish_reason_from_name(const std::string& name) {
  if (name == "stop") return FinishReason::Stop;
  if (name == "length") return FinishReason::Length;
  return FinishReason::Error;
}

struct ParsedUrl {
  std::string scheme_host_port;  // httplib client target
  std::string path_prefix;       // e.g. "/v1"
};

ParsedUrl parse_base_url(const std::string& base_url) {
  auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) throw Error("invalid base_url: " + base_url);
  auto path_start = base_url.find('/', scheme_end + 3);
  ParsedUrl out;
  if (path_start == std::string::npos) {
    out.scheme_host_port = base_url;
  } else {
    out.scheme_host_port = base_url.substr(0, path_start);
    out.path_prefix = base_url.substr(path_start);
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
  }
  return out;
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

std::string cache_key(const PromptBundle& bundle, const GenerationConfig& cfg,
                      const std::string& model_id) {
  json payload;
  payload["messages"] = normalize_messages(bundle);
  payload["gen"] = generation_to_json(cfg);
  payload["model"] = model_id;
  return sha256_hex(payload.dump());
}

std::string embed_cache_key(const std::string& text, const std::string& model_id) {
  json payload;
  payload["embed"] = text;
  payload["model"] = model_id;
  return sha256_hex(payload.dump());
}

class LlmClient::InflightGuard {
 public:
  InflightGuard(Slot* slot, int limit) : slot_(slot) {
    std::unique_lock lock(slot_->m);
    slot_->cv.wait(lock, [&] { return slot_->in_flight < limit; });
    slot_->in_flight++;
  }
  ~InflightGuard() {
    {
      std::lock_guard lock(slot_->m);
      slot_->in_flight--;
    }
    slot_->cv.notify_one();
  }
  InflightGuard(const InflightGuard&) = delete;
  InflightGuard& operator=(const InflightGuard&) = delete;

 private:
  Slot* slot_;
};

LlmClient::LlmClient(ClientOptions options) : options_(std::move(options)) {}

std::filesystem::path LlmClient::cache_path(const std::string& model_id,
                                            const std::string& key) const {
  return options_.cache_dir / slugify(model_id) / (key + ".json");
}

std::optional<json> LlmClient::cache_get(const std::string& model_id, const std::string& key) {
  if (options_.cache_dir.empty()) return std::nullopt;
  auto path = cache_path(model_id, key);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  try {
    return json::parse(read_file(path));
  } catch (const std::exception&) {
    return std::nullopt;  // treat a corrupt record as a miss; it will be rewritten
  }
}

void LlmClient::cache_put(const std::string& model_id, const std::string& key,
                          const json& record) {
  if (options_.cache_dir.empty()) return;
  atomic_write_file(cache_path(model_id, key), record.dump(2) + "\n");
}

json LlmClient::post_json(const EndpointConfig& ep, const std::string& path, const json& body) {
  Slot* slot = nullptr;
  {
    std::lock_guard lock(slots_mutex_);
    auto& entry = slots_[ep.base_url + "|" + ep.model_id];
    if (!entry) entry = std::make_unique<Slot>();
    slot = entry.get();
  }
  InflightGuard guard(slot, ep.max_in_flight > 0 ? ep.max_in_flight : 1);

  auto url = parse_base_url(ep.base_url);
  std::string last_error;
  const int attempts = 1 + std::max(0, ep.max_retries);
  for (int attempt = 0; attempt < attempts; attempt++) {
    if (attempt > 0) {
      // Exponential backoff: delays are monotone nondecreasing across attempts.
      auto delay = std::chrono::milliseconds(
          static_cast<std::int64_t>(options_.backoff_base_ms) * (1LL << (attempt - 1)));
      std::this_thread::sleep_for(delay);
    }
    httplib::Client cli(url.scheme_host_port);
    cli.set_connection_timeout(ep.timeout_s, 0);
    cli.set_read_timeout(ep.timeout_s, 0);
    cli.set_write_timeout(ep.timeout_s, 0);
    httplib::Headers headers;
    if (!ep.api_key.empty()) headers.emplace("Authorization", "Bearer " + ep.api_key);

    stats_.http_requests++;
    auto res = cli.Post(url.path_prefix + path, headers, body.dump(), "application/json");
    if (!res) {
      last_error = "connection failed or timed out (" + httplib::to_string(res.error()) + ")";
      continue;
    }
    if (res->status == 200) {
      try {
        return json::parse(res->body);
      } catch (const json::parse_error& e) {
        throw Error("endpoint returned invalid JSON: " + std::string(e.what()));
      }
    }
    if (res->status == 429) {
      last_error = RateLimitedError().what();
      continue;
    }
    if (retryable_status(res->status)) {
      last_error = HttpStatusError(res->status, "").what();
      continue;
    }
    throw HttpStatusError(res->status, res->body.substr(0, 200));
  }
  if (ep.max_retries <= 0) {
    if (last_error == std::string(RateLimitedError().what())) throw RateLimitedError();
    throw TimeoutError(last_error);
  }
  throw ExhaustedRetriesError(last_error);
}

Completion LlmClient::complete(const PromptBundle& bundle, const GenerationConfig& cfg,
                               const EndpointConfig& ep) {
  return complete_salted(bundle, cfg, ep, 0);
}

Completion LlmClient::complete_salted(const PromptBundle& bundle, const GenerationConfig& cfg,
                                      const EndpointConfig& ep, int salt) {
  if (bundle.messages.empty()) throw Error("cannot complete an empty prompt bundle");

  std::string key = cache_key(bundle, cfg, ep.model_id);
  if (salt != 0) key = sha256_hex(key + "#retry" + std::to_string(salt));

  if (auto record = cache_get(ep.model_id, key)) {
    stats_.cache_hits++;
    Completion completion;
    completion.text = (*record)["response"]["text"].get<std::string>();
    completion.finish_reason =
        finish_reason_from_name((*record)["response"]["finish_reason"].get<std::string>());
    completion.latency_ms = (*record)["response"].value("latency_ms", 0ULL);
    completion.model_id = ep.model_id;
    return completion;
  }
  stats_.cache_misses++;
  if (options_.offline) throw CacheMissError(key);

  json body;
  body["model"] = ep.model_id;
  body["messages"] = normalize_messages(bundle);
  body["max_tokens"] = cfg.max_new_tokens;
  body["temperature"] = cfg.temperature;
  body["top_p"] = cfg.top_p;
  if (ep.send_top_k) body["top_k"] = cfg.top_k;
  if (cfg.seed) body["seed"] = *cfg.seed;

  auto start = std::chrono::steady_clock::now();
  json resp = post_json(ep, "/chat/completions", body);
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();

  Completion completion;
  try {
    const auto& choice = resp.at("choices").at(0);
    completion.text = choice.at("message").at("content").get<std::string>();
    completion.finish_reason = finish_reason_from_name(choice.value("finish_reason", "stop"));
  } catch (const json::exception& e) {
    throw Error("unexpected chat completion payload: " + std::string(e.what()));
  }
  completion.latency_ms = static_cast<std::uint64_t>(elapsed);
  completion.model_id = ep.model_id;

  json record;
  record["key"] = key;
  record["model"] = ep.model_id;
  record["request"] = body;
  record["response"] = {{"text", completion.text},
                        {"finish_reason", finish_reason_name(completion.finish_reason)},
                        {"latency_ms", completion.latency_ms}};
  cache_put(ep.model_id, key, record);
  return completion;
}

std::vector<double> LlmClient::embed(const std::string& text, const EndpointConfig& ep) {
  if (text.empty()) throw Error("cannot embed empty text");

  const std::string key = embed_cache_key(text, ep.model_id);
  std::vector<double> vec;

  if (auto record = cache_get(ep.model_id, key)) {
    stats_.cache_hits++;
    vec = (*record)["response"]["embedding"].get<std::vector<double>>();
  } else {
    stats_.cache_misses++;
    if (options_.offline) throw CacheMissError(key);

    json body;
    body["model"] = ep.model_id;
    body["input"] = text;
    json resp = post_json(ep, "/embeddings", body);
    try {
      vec = resp.at("data").at(0).at("embedding").get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw Error("unexpected embedding payload: " + std::string(e.what()));
    }

    json stored;
    stored["key"] = key;
    stored["model"] = ep.model_id;
    stored["request"] = body;
    stored["response"] = {{"embedding", vec}};
    cache_put(ep.model_id, key, stored);
  }

  {
    // Dimension must stay constant per model within a run.
    std::lock_guard lock(dims_mutex_);
    auto [it, inserted] = embed_dims_.emplace(ep.model_id, vec.size());
    if (!inserted && it->second != vec.size()) {
      throw DimensionMismatchError("embedding dimension changed for model '" + ep.model_id +
                                   "': " + std::to_string(it->second) + " vs " +
                                   std::to_string(vec.size()));
    }
  }
  return vec;
}

}  // namespace sarcbench
