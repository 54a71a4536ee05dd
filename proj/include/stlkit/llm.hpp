#pragma once

#include <chrono>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "stlkit/error.hpp"

namespace stlkit::llm {

struct ChatRequest {
  std::string system_prompt;
  std::string user_prompt;
  double temperature = 0.0;
  int max_tokens = 1024;
  std::string tag;  // label for logs and for scripted replay
};

struct ChatResponse {
  std::string text;
  std::chrono::milliseconds latency{0};
  std::string backend_id;
};

enum class BackendKind { Scripted, Http };

struct BackendConfig {
  BackendKind kind = BackendKind::Scripted;
  std::string endpoint;        // e.g. https://api.example.com/v1
  std::string model;
  std::string credential_env;  // name of the variable holding the API key
  std::string script_path;     // JSON Lines replay file for the scripted kind
  std::chrono::milliseconds timeout{60000};
  int max_retries = 3;
  std::chrono::milliseconds backoff_base{500};
  std::chrono::milliseconds backoff_cap{8000};

  /// Throws ConfigError when a required field is missing.
  void validate() const;
};

class BackendError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class Timeout : public BackendError {
 public:
  using BackendError::BackendError;
};

class HttpStatus : public BackendError {
 public:
  HttpStatus(int code, const std::string& detail);
  int code() const { return code_; }

 private:
  int code_;
};

class ScriptExhausted : public BackendError {
 public:
  explicit ScriptExhausted(std::string tag);
  const std::string& tag() const { return tag_; }

 private:
  std::string tag_;
};

class CredentialMissing : public BackendError {
 public:
  explicit CredentialMissing(const std::string& variable);
};

/// A chat-completion service. Implementations are safe to call from
/// several threads at once.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual ChatResponse complete(const ChatRequest& req) = 0;
  virtual std::string id() const = 0;
};

/// Replays canned responses. Each entry answers requests with its tag; an
/// entry with `match` only answers when that text occurs in the user prompt.
/// Entries are consumed first-in first-out unless `repeat` is set.
class ScriptedBackend : public Backend {
 public:
  struct Entry {
    std::string tag;
    std::string response;
    std::optional<std::string> match;
    bool repeat = false;
  };

  ScriptedBackend() = default;
  explicit ScriptedBackend(std::vector<Entry> entries);

  /// JSON Lines of {"tag", "response", optional "match", optional "repeat"}.
  static std::shared_ptr<ScriptedBackend> from_file(const std::string& path);
  static std::shared_ptr<ScriptedBackend> from_jsonl(const std::string& text);

  void add(Entry e);
  ChatResponse complete(const ChatRequest& req) override;
  std::string id() const override { return "scripted"; }

  /// Requests served so far, in order.
  std::vector<ChatRequest> history() const;
  std::size_t remaining(const std::string& tag) const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::deque<Entry>> queues_;
  std::vector<ChatRequest> history_;
};

/// Client for POST {endpoint}/chat/completions with bearer authentication.
/// Connection failures, timeouts, 429 and 5xx are retried with capped
/// exponential backoff plus jitter; other statuses fail at once.
class HttpChatBackend : public Backend {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit HttpChatBackend(BackendConfig cfg, Sleeper sleeper = nullptr);
  ChatResponse complete(const ChatRequest& req) override;
  std::string id() const override;

  /// Attempts made by the last complete() call on this thread.
  static int last_attempts();

 private:
  BackendConfig cfg_;
  Sleeper sleep_;
};

/// Builds the backend a config describes.
std::shared_ptr<Backend> make_backend(const BackendConfig& cfg);

/// One-shot convenience over make_backend(cfg)->complete(req).
ChatResponse complete(const ChatRequest& req, const BackendConfig& cfg);

/// Splits "https://host:port/base" into ("https://host:port", "/base").
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint);

}  // namespace stlkit::llm
