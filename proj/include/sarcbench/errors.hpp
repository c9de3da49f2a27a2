#pragma once

#include <stdexcept>
#include <string>

namespace sarcbench {

/// Base class for every error the harness raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- dataset_io ---

class MalformedLineError : public Error {
 public:
  MalformedLineError(int line_no, const std::string& detail)
      : Error("malformed line " + std::to_string(line_no) + ": " + detail), line_no(line_no) {}
  int line_no;
};

class MissingFieldError : public Error {
 public:
  MissingFieldError(int line_no, std::string field)
      : Error("line " + std::to_string(line_no) + ": missing field '" + field + "'"),
        line_no(line_no),
        field(std::move(field)) {}
  int line_no;
  std::string field;
};

class DuplicateIdError : public Error {
 public:
  explicit DuplicateIdError(std::string id)
      : Error("duplicate sample id '" + id + "'"), id(std::move(id)) {}
  std::string id;
};

class VarietyMismatchError : public Error {
 public:
  VarietyMismatchError(int line_no, const std::string& detail)
      : Error("line " + std::to_string(line_no) + ": variety mismatch (" + detail + ")"),
        line_no(line_no) {}
  int line_no;
};

class EmptyDatasetError : public Error {
 public:
  EmptyDatasetError() : Error("dataset has no samples") {}
};

// --- prompt_engine ---

class OriginUnsupportedVarietyError : public Error {
 public:
  OriginUnsupportedVarietyError()
      : Error("origin strategy requires an Australian or Indian sample") {}
};

// --- llm_client ---

class TimeoutError : public Error {
 public:
  using Error::Error;
};

class HttpStatusError : public Error {
 public:
  HttpStatusError(int status, const std::string& body)
      : Error("http status " + std::to_string(status) + (body.empty() ? "" : ": " + body)),
        status(status) {}
  int status;
};

class RateLimitedError : public Error {
 public:
  RateLimitedError() : Error("rate limited (429)") {}
};

class ExhaustedRetriesError : public Error {
 public:
  explicit ExhaustedRetriesError(const std::string& last)
      : Error("retries exhausted; last error: " + last) {}
};

class CacheMissError : public Error {
 public:
  explicit CacheMissError(const std::string& key)
      : Error("offline mode and no cached response for " + key) {}
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

class ZeroVectorError : public Error {
 public:
  ZeroVectorError() : Error("cosine similarity undefined for a zero vector") {}
};

// --- agent_runtime ---

class NoJsonFoundError : public Error {
 public:
  NoJsonFoundError() : Error("no JSON action blob found in model output") {}
};

class InvalidJsonError : public Error {
 public:
  using Error::Error;
};

class UnknownActionError : public Error {
 public:
  explicit UnknownActionError(std::string name)
      : Error("unknown action '" + name + "'"), name(std::move(name)) {}
  std::string name;
};

class MissingKeyError : public Error {
 public:
  explicit MissingKeyError(std::string key)
      : Error("action blob missing key '" + key + "'"), key(std::move(key)) {}
  std::string key;
};

class SearchUnavailableError : public Error {
 public:
  using Error::Error;
};

// --- verdict_parser ---

class EmptyCompletionError : public Error {
 public:
  EmptyCompletionError() : Error("completion text is empty") {}
};

class NoExplanationFoundError : public Error {
 public:
  NoExplanationFoundError() : Error("no explanation text found in completion") {}
};

// --- metrics ---

class EmptyInputError : public Error {
 public:
  EmptyInputError() : Error("empty input") {}
};

class LengthMismatchError : public Error {
 public:
  LengthMismatchError(std::size_t a, std::size_t b)
      : Error("paired score lists differ in length (" + std::to_string(a) + " vs " +
              std::to_string(b) + ")") {}
};

class JudgeFailureError : public Error {
 public:
  using Error::Error;
};

// --- runner_report ---

class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& detail)
      : Error("config error at " + path + ": " + detail) {}
};

class ConfigDigestMismatchError : public Error {
 public:
  explicit ConfigDigestMismatchError(const std::string& digest)
      : Error("no prior run found for config digest " + digest) {}
};

}  // namespace sarcbench
