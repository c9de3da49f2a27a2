#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace sarcbench {

/// Backend behind the agent's Search tool. Implementations must be safe for
/// concurrent invocation.
class SearchProvider {
 public:
  virtual ~SearchProvider() = default;
  /// Top result snippets for a query. Throws SearchUnavailableError.
  virtual std::vector<std::string> search(const std::string& query, int top_k) = 0;
};

/// Deterministic provider backed by a directory of fixture files, one per
/// query: `<dir>/<slug(query)>.json` containing {"query": ..., "results": [...]}.
class FixtureSearchProvider : public SearchProvider {
 public:
  explicit FixtureSearchProvider(std::filesystem::path dir) : dir_(std::move(dir)) {}
  std::vector<std::string> search(const std::string& query, int top_k) override;

  static std::filesystem::path fixture_path(const std::filesystem::path& dir,
                                            const std::string& query);

 private:
  std::filesystem::path dir_;
};

/// Live provider hitting a DuckDuckGo-style instant-answer JSON endpoint
/// (GET <base>?q=<query>&format=json).
class HttpSearchProvider : public SearchProvider {
 public:
  explicit HttpSearchProvider(std::string base_url = "https://api.duckduckgo.com",
                              int timeout_s = 15)
      : base_url_(std::move(base_url)), timeout_s_(timeout_s) {}
  std::vector<std::string> search(const std::string& query, int top_k) override;

 private:
  std::string base_url_;
  int timeout_s_;
};

struct SearchOptions {
  int top_k = 3;
  std::size_t observation_budget = 1500;  // keeps observations inside the generation budget
};

/// The Search tool body: concatenated top-k snippets, truncated to the
/// observation budget; "No results found." when the provider returns nothing.
std::string run_search_tool(SearchProvider& provider, const std::string& query,
                            const SearchOptions& options = {});

/// Bind a provider into a ToolRegistry-compatible callable.
std::function<std::string(const std::string&)> make_search_tool(
    std::shared_ptr<SearchProvider> provider, SearchOptions options = {});

}  // namespace sarcbench
