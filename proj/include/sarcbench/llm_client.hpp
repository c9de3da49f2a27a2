#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sarcbench/prompts.hpp"

namespace sarcbench {

struct GenerationConfig {
  int max_new_tokens = 1024;
  double temperature = 1.0;
  double top_p = 0.95;
  int top_k = 64;
  std::optional<std::int64_t> seed;

  bool operator==(const GenerationConfig&) const = default;
};

nlohmann::json generation_to_json(const GenerationConfig& cfg);
GenerationConfig generation_from_json(const nlohmann::json& j);

enum class FinishReason { Stop, Length, Error };

std::string finish_reason_name(FinishReason r);

struct Completion {
  std::string text;
  FinishReason finish_reason = FinishReason::Stop;
  std::uint64_t latency_ms = 0;
  std::string model_id;
};

struct EndpointConfig {
  std::string base_url;      // e.g. http://127.0.0.1:8080/v1
  std::string api_key;       // resolved from api_key_env at config load
  std::string api_key_env;   // name of the env var holding the key
  std::string model_id;
  int timeout_s = 60;
  int max_retries = 3;
  bool send_top_k = true;    // some chat endpoints reject top_k; drop it there
  int max_in_flight = 4;
};

/// Stable content hash over normalized messages + generation settings + model id.
std::string cache_key(const PromptBundle& bundle, const GenerationConfig& cfg,
                      const std::string& model_id);

std::string embed_cache_key(const std::string& text, const std::string& model_id);

struct ClientStats {
  std::atomic<std::uint64_t> cache_hits{0};
  std::atomic<std::uint64_t> cache_misses{0};
  std::atomic<std::uint64_t> http_requests{0};

  double hit_ratio() const {
    auto h = cache_hits.load(), m = cache_misses.load();
    return (h + m) == 0 ? 0.0 : static_cast<double>(h) / static_cast<double>(h + m);
  }
};

struct ClientOptions {
  std::filesystem::path cache_dir;  // empty disables the replay cache
  bool offline = false;             // cache misses become errors
  int backoff_base_ms = 500;        // first retry delay; doubles per attempt
};

/// Chat-completion + embedding client with retries, per-endpoint in-flight
/// limiting, and an append-only record/replay cache. Safe for concurrent use.
class LlmClient {
 public:
  explicit LlmClient(ClientOptions options = {});

  Completion complete(const PromptBundle& bundle, const GenerationConfig& cfg,
                      const EndpointConfig& ep);

  std::vector<double> embed(const std::string& text, const EndpointConfig& ep);

  /// Same as complete() but salts the cache key; used by judge retries so a
  /// deterministic endpoint is re-asked instead of replaying the bad record.
  Completion complete_salted(const PromptBundle& bundle, const GenerationConfig& cfg,
                             const EndpointConfig& ep, int salt);

  const ClientStats& stats() const { return stats_; }
  const ClientOptions& options() const { return options_; }

 private:
  class InflightGuard;

  nlohmann::json post_json(const EndpointConfig& ep, const std::string& path,
                           const nlohmann::json& body);
  std::optional<nlohmann::json> cache_get(const std::string& model_id, const std::string& key);
  void cache_put(const std::string& model_id, const std::string& key,
                 const nlohmann::json& record);
  std::filesystem::path cache_path(const std::string& model_id, const std::string& key) const;

  ClientOptions options_;
  ClientStats stats_;

  std::mutex dims_mutex_;
  std::map<std::string, std::size_t> embed_dims_;  // model_id -> dimension seen this run

  struct Slot {
    std::mutex m;
    std::condition_variable cv;
    int in_flight = 0;
  };
  std::mutex slots_mutex_;
  std::map<std::string, std::unique_ptr<Slot>> slots_;
};

}  // namespace sarcbench
