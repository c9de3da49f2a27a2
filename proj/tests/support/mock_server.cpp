#include "mock_server.hpp"

#include <httplib.h>

#include <mutex>

#include "sarcbench/util.hpp"

namespace sarcbench::testing {

using nlohmann::json;

std::vector<double> hash_embedding(const std::string& text) {
  auto digest = sha256_bytes(text);
  std::vector<double> out(8);
  for (size_t i = 0; i < 8; i++) {
    std::uint32_t u = (static_cast<std::uint32_t>(digest[4 * i]) << 24) |
                      (static_cast<std::uint32_t>(digest[4 * i + 1]) << 16) |
                      (static_cast<std::uint32_t>(digest[4 * i + 2]) << 8) |
                      static_cast<std::uint32_t>(digest[4 * i + 3]);
    out[i] = static_cast<double>(u) / 4294967296.0 + 0.5;
  }
  return out;
}

int hash_judge_score(const std::string& user_content) {
  return static_cast<int>(sha256_bytes(user_content)[0] % 6);
}

std::string detect_strategy(const std::string& system_text) {
  if (system_text.find("Valid \"action\" values") != std::string::npos) return "kg";
  if (system_text.find("Specific Pragmatic Analysis/Reassessment") != std::string::npos)
    return "pmp";
  if (system_text.rfind("This text is from", 0) == 0) return "origin";
  if (system_text.find("Following are some examples") != std::string::npos) return "few";
  return "zero";
}

struct MockServer::Impl {
  httplib::Server server;
  std::mutex mutex;
  json fixtures;  // strategy -> text -> string | [per-turn strings]
  std::function<std::string(const json&)> chat_handler;
  int fail_count = 0;
  int fail_status = 500;
  int embed_dim_once = 0;
};

namespace {

constexpr const char* kRubricSentinel = "Irrelevant or incoherent explanation";

std::string first_user_text(const json& body) {
  for (const auto& msg : body.at("messages")) {
    if (msg.at("role") == "user") {
      std::string content = msg.at("content").get<std::string>();
      if (content.rfind("Text: ", 0) == 0) return content.substr(6);
    }
  }
  return "";
}

std::string last_user_content(const json& body) {
  std::string out;
  for (const auto& msg : body.at("messages")) {
    if (msg.at("role") == "user") out = msg.at("content").get<std::string>();
  }
  return out;
}

std::string system_text(const json& body) {
  for (const auto& msg : body.at("messages")) {
    if (msg.at("role") == "system") return msg.at("content").get<std::string>();
  }
  return "";
}

size_t assistant_turns(const json& body) {
  size_t n = 0;
  for (const auto& msg : body.at("messages")) {
    if (msg.at("role") == "assistant") n++;
  }
  return n;
}

}  // namespace

MockServer::MockServer() : impl_(std::make_unique<Impl>()) {
  auto chat = [this](const httplib::Request& req, httplib::Response& res) {
    requests_++;
    {
      std::lock_guard lock(impl_->mutex);
      if (impl_->fail_count > 0) {
        impl_->fail_count--;
        res.status = impl_->fail_status;
        res.set_content("injected fault", "text/plain");
        return;
      }
    }
    json body = json::parse(req.body);

    std::string content;
    {
      std::lock_guard lock(impl_->mutex);
      if (impl_->chat_handler) content = impl_->chat_handler(body);
    }
    if (content.empty()) {
      const std::string system = system_text(body);
      if (system.find(kRubricSentinel) != std::string::npos) {
        content = "Score: " + std::to_string(hash_judge_score(last_user_content(body)));
      } else {
        std::lock_guard lock(impl_->mutex);
        const std::string strategy = detect_strategy(system);
        const std::string text = first_user_text(body);
        if (impl_->fixtures.contains(strategy) && impl_->fixtures[strategy].contains(text)) {
          const json& entry = impl_->fixtures[strategy][text];
          if (entry.is_string()) {
            content = entry.get<std::string>();
          } else if (entry.is_array() && !entry.empty()) {
            size_t turn = std::min(assistant_turns(body), entry.size() - 1);
            content = entry[turn].get<std::string>();
          }
        }
        if (content.empty() && !impl_->fixtures.is_object()) content = "not_sarcastic";
        if (content.empty()) {
          res.status = 404;
          res.set_content("no completion fixture for strategy '" + strategy + "' text '" + text +
                              "'",
                          "text/plain");
          return;
        }
      }
    }

    json reply = {{"choices", json::array({{{"message", {{"role", "assistant"},
                                                         {"content", content}}},
                                            {"finish_reason", "stop"}}})}};
    res.set_content(reply.dump(), "application/json");
  };

  auto embeddings = [this](const httplib::Request& req, httplib::Response& res) {
    requests_++;
    {
      std::lock_guard lock(impl_->mutex);
      if (impl_->fail_count > 0) {
        impl_->fail_count--;
        res.status = impl_->fail_status;
        res.set_content("injected fault", "text/plain");
        return;
      }
    }
    json body = json::parse(req.body);
    auto vec = hash_embedding(body.at("input").get<std::string>());
    {
      std::lock_guard lock(impl_->mutex);
      if (impl_->embed_dim_once > 0) {
        vec.resize(static_cast<size_t>(impl_->embed_dim_once), 0.25);
        impl_->embed_dim_once = 0;
      }
    }
    json reply = {{"data", json::array({{{"embedding", vec}}})}};
    res.set_content(reply.dump(), "application/json");
  };

  impl_->server.Post("/v1/chat/completions", chat);
  impl_->server.Post("/v1/embeddings", embeddings);

  port_ = impl_->server.bind_to_any_port("127.0.0.1");
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

MockServer::~MockServer() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

std::string MockServer::base_url() const {
  return "http://127.0.0.1:" + std::to_string(port_) + "/v1";
}

void MockServer::load_completion_fixtures(const std::filesystem::path& path) {
  std::lock_guard lock(impl_->mutex);
  impl_->fixtures = json::parse(read_file(path));
}

void MockServer::set_completions(json fixtures) {
  std::lock_guard lock(impl_->mutex);
  impl_->fixtures = std::move(fixtures);
}

void MockServer::set_chat_handler(std::function<std::string(const json&)> handler) {
  std::lock_guard lock(impl_->mutex);
  impl_->chat_handler = std::move(handler);
}

void MockServer::fail_next(int count, int status) {
  std::lock_guard lock(impl_->mutex);
  impl_->fail_count = count;
  impl_->fail_status = status;
}

void MockServer::set_embed_dim_once(int dim) {
  std::lock_guard lock(impl_->mutex);
  impl_->embed_dim_once = dim;
}

}  // namespace sarcbench::testing
