#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sarcbench/errors.hpp"
#include "sarcbench/llm_client.hpp"
#include "support/mock_server.hpp"
#include "support/temp_dir.hpp"

using namespace sarcbench;
using sarcbench::testing::MockServer;
using sarcbench::testing::TempDir;

namespace {

PromptBundle simple_bundle(const std::string& text = "Text: hello") {
  PromptBundle bundle;
  bundle.strategy = Strategy::Zero;
  bundle.messages.push_back({Role::System, "instructions"});
  bundle.messages.push_back({Role::User, text});
  return bundle;
}

EndpointConfig endpoint(const MockServer& server, int max_retries = 3) {
  EndpointConfig ep;
  ep.base_url = server.base_url();
  ep.model_id = "mock-chat";
  ep.timeout_s = 5;
  ep.max_retries = max_retries;
  return ep;
}

}  // namespace

TEST_CASE("cache_key is stable and sensitive to inputs") {
  GenerationConfig cfg;
  auto bundle = simple_bundle();
  auto k1 = cache_key(bundle, cfg, "m");
  auto k2 = cache_key(bundle, cfg, "m");
  CHECK(k1 == k2);
  CHECK(k1.size() == 64);

  GenerationConfig cold = cfg;
  cold.temperature = 0.0;
  CHECK(cache_key(bundle, cold, "m") != k1);

  PromptBundle reordered;
  reordered.strategy = bundle.strategy;
  reordered.messages = {bundle.messages[1], bundle.messages[0]};
  CHECK(cache_key(reordered, cfg, "m") != k1);

  CHECK(cache_key(bundle, cfg, "other-model") != k1);
}

TEST_CASE("complete returns the scripted completion") {
  MockServer server;  // no fixtures: replies not_sarcastic
  LlmClient client({.cache_dir = {}, .offline = false, .backoff_base_ms = 1});
  auto completion = client.complete(simple_bundle(), {}, endpoint(server));
  CHECK(completion.text == "not_sarcastic");
  CHECK(completion.finish_reason == FinishReason::Stop);
  CHECK(completion.model_id == "mock-chat");
}

TEST_CASE("complete retries through transient failures") {
  MockServer server;
  LlmClient client({.cache_dir = {}, .offline = false, .backoff_base_ms = 1});

  SUBCASE("two 500s then success with max_retries=3") {
    server.fail_next(2, 500);
    auto completion = client.complete(simple_bundle(), {}, endpoint(server, 3));
    CHECK(completion.text == "not_sarcastic");
    CHECK(server.request_count() == 3);
  }
  SUBCASE("a 429 is retried") {
    server.fail_next(1, 429);
    auto completion = client.complete(simple_bundle(), {}, endpoint(server, 2));
    CHECK(completion.text == "not_sarcastic");
    CHECK(server.request_count() == 2);
  }
  SUBCASE("retries bounded by max_retries") {
    server.fail_next(10, 500);
    CHECK_THROWS_AS(client.complete(simple_bundle(), {}, endpoint(server, 2)),
                    ExhaustedRetriesError);
    CHECK(server.request_count() == 3);  // 1 attempt + 2 retries
  }
  SUBCASE("client errors are not retried") {
    server.fail_next(5, 400);
    CHECK_THROWS_AS(client.complete(simple_bundle(), {}, endpoint(server, 3)), HttpStatusError);
    CHECK(server.request_count() == 1);
  }
}

TEST_CASE("replay cache makes repeated calls identical and offline-capable") {
  MockServer server;
  TempDir cache;
  auto ep = endpoint(server);

  LlmClient client({.cache_dir = cache.path(), .offline = false, .backoff_base_ms = 1});
  auto first = client.complete(simple_bundle(), {}, ep);
  auto before = server.request_count();
  auto second = client.complete(simple_bundle(), {}, ep);
  CHECK(second.text == first.text);
  CHECK(server.request_count() == before);  // served from cache
  CHECK(client.stats().cache_hits.load() == 1);

  // Offline client replays the same cache with zero network calls.
  LlmClient offline({.cache_dir = cache.path(), .offline = true, .backoff_base_ms = 1});
  auto replayed = offline.complete(simple_bundle(), {}, ep);
  CHECK(replayed.text == first.text);
  CHECK(server.request_count() == before);

  CHECK_THROWS_AS(offline.complete(simple_bundle("Text: something new"), {}, ep), CacheMissError);
}

TEST_CASE("embed returns deterministic vectors and checks dimensions") {
  MockServer server;
  TempDir cache;
  auto ep = endpoint(server);
  ep.model_id = "mock-embed";

  LlmClient client({.cache_dir = cache.path(), .offline = false, .backoff_base_ms = 1});
  auto v1 = client.embed("a phrase", ep);
  auto v2 = client.embed("a phrase", ep);
  REQUIRE(v1.size() == 8);
  CHECK(v1 == v2);
  CHECK(client.stats().cache_hits.load() == 1);
  CHECK(v1 == sarcbench::testing::hash_embedding("a phrase"));

  server.set_embed_dim_once(7);
  CHECK_THROWS_AS(client.embed("different phrase", ep), DimensionMismatchError);
}

TEST_CASE("embed rejects empty text") {
  MockServer server;
  LlmClient client({.cache_dir = {}, .offline = false, .backoff_base_ms = 1});
  auto ep = endpoint(server);
  CHECK_THROWS_AS(client.embed("", ep), Error);
}
