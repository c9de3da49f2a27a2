#include "sarcbench/search.hpp"

#include <httplib.h>
#include <json.hpp>

#include "sarcbench/errors.hpp"
#include "sarcbench/util.hpp"

namespace sarcbench {

using nlohmann::json;

std::filesystem::path FixtureSearchProvider::fixture_path(const std::filesystem::path& dir,
                                                          const std::string& query) {
  return dir / (slugify(query) + ".json");
}

std::vector<std::string> FixtureSearchProvider::search(const std::string& query, int top_k) {
  auto path = fixture_path(dir_, query);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    throw SearchUnavailableError("no search fixture for query '" + query + "' (expected " +
                                 path.string() + ")");
  }
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const std::exception& e) {
    throw SearchUnavailableError("bad search fixture " + path.string() + ": " + e.what());
  }
  std::vector<std::string> out;
  for (const auto& item : doc.value("results", json::array())) {
    if (item.is_string()) out.push_back(item.get<std::string>());
    if (static_cast<int>(out.size()) >= top_k) break;
  }
  return out;
}

std::vector<std::string> HttpSearchProvider::search(const std::string& query, int top_k) {
  auto scheme_end = base_url_.find("://");
  if (scheme_end == std::string::npos)
    throw SearchUnavailableError("invalid search base url: " + base_url_);
  auto path_start = base_url_.find('/', scheme_end + 3);
  std::string host = path_start == std::string::npos ? base_url_ : base_url_.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : base_url_.substr(path_start);

  httplib::Client cli(host);
  cli.set_connection_timeout(timeout_s_, 0);
  cli.set_read_timeout(timeout_s_, 0);
  cli.set_follow_location(true);

  httplib::Params params{{"q", query}, {"format", "json"}, {"no_html", "1"}};
  auto res = cli.Get(prefix + "/", params, httplib::Headers{});
  if (!res) throw SearchUnavailableError("search request failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw SearchUnavailableError("search endpoint returned status " +
                                 std::to_string(res->status));

  json doc;
  try {
    doc = json::parse(res->body);
  } catch (const std::exception& e) {
    throw SearchUnavailableError("search endpoint returned invalid JSON: " + std::string(e.what()));
  }

  std::vector<std::string> out;
  // Instant-answer payload: AbstractText plus RelatedTopics[].Text. A plain
  // {"results": [...]} list is also accepted so self-hosted backends work.
  if (doc.contains("AbstractText") && doc["AbstractText"].is_string()) {
    auto abstract = doc["AbstractText"].get<std::string>();
    if (!abstract.empty()) out.push_back(abstract);
  }
  if (doc.contains("RelatedTopics") && doc["RelatedTopics"].is_array()) {
    for (const auto& topic : doc["RelatedTopics"]) {
      if (static_cast<int>(out.size()) >= top_k) break;
      if (topic.contains("Text") && topic["Text"].is_string()) {
        auto text = topic["Text"].get<std::string>();
        if (!text.empty()) out.push_back(text);
      }
    }
  }
  for (const auto& item : doc.value("results", json::array())) {
    if (static_cast<int>(out.size()) >= top_k) break;
    if (item.is_string()) out.push_back(item.get<std::string>());
  }
  if (static_cast<int>(out.size()) > top_k) out.resize(static_cast<std::size_t>(top_k));
  return out;
}

std::string run_search_tool(SearchProvider& provider, const std::string& query,
                            const SearchOptions& options) {
  if (trim(query).empty()) throw Error("search query is empty");
  auto snippets = provider.search(query, options.top_k);
  if (snippets.empty()) return "No results found.";
  std::string out;
  for (size_t i = 0; i < snippets.size() && static_cast<int>(i) < options.top_k; i++) {
    if (!out.empty()) out += "\n";
    out += snippets[i];
  }
  if (out.size() > options.observation_budget) {
    out.resize(options.observation_budget);
  }
  return out;
}

std::function<std::string(const std::string&)> make_search_tool(
    std::shared_ptr<SearchProvider> provider, SearchOptions options) {
  return [provider = std::move(provider), options](const std::string& query) {
    return run_search_tool(*provider, query, options);
  };
}

}  // namespace sarcbench
