#include <sstream>

#include <json.hpp>

#include "stlkit/io.hpp"
#include "stlkit/llm.hpp"

namespace stlkit::llm {

HttpStatus::HttpStatus(int code, const std::string& detail)
    : BackendError("HTTP status " + std::to_string(code) + (detail.empty() ? "" : ": " + detail)),
      code_(code) {}

ScriptExhausted::ScriptExhausted(std::string tag)
    : BackendError("no scripted response left for tag '" + tag + "'"), tag_(std::move(tag)) {}

CredentialMissing::CredentialMissing(const std::string& variable)
    : BackendError("credential variable " + variable + " is not set") {}

void BackendConfig::validate() const {
  if (kind == BackendKind::Http) {
    if (endpoint.empty()) throw ConfigError("http backend needs an endpoint");
    if (model.empty()) throw ConfigError("http backend needs a model");
  }
  if (max_retries < 0) throw ConfigError("max_retries must be non-negative");
  if (timeout.count() <= 0) throw ConfigError("timeout must be positive");
}

ScriptedBackend::ScriptedBackend(std::vector<Entry> entries) {
  for (auto& e : entries) add(std::move(e));
}

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_jsonl(const std::string& text) {
  auto backend = std::make_shared<ScriptedBackend>();
  std::istringstream in(text);
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Entry e;
      e.tag = j.at("tag").get<std::string>();
      e.response = j.at("response").get<std::string>();
      if (j.contains("match")) e.match = j.at("match").get<std::string>();
      e.repeat = j.value("repeat", false);
      backend->add(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw ConfigError("script line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return backend;
}

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::string& path) {
  return from_jsonl(read_file(path));
}

void ScriptedBackend::add(Entry e) {
  std::lock_guard lock(mutex_);
  const std::string tag = e.tag;
  queues_[tag].push_back(std::move(e));
}

ChatResponse ScriptedBackend::complete(const ChatRequest& req) {
  std::lock_guard lock(mutex_);
  history_.push_back(req);
  auto it = queues_.find(req.tag);
  if (it != queues_.end()) {
    auto& queue = it->second;
    for (auto e = queue.begin(); e != queue.end(); ++e) {
      if (e->match && req.user_prompt.find(*e->match) == std::string::npos) continue;
      ChatResponse resp{e->response, std::chrono::milliseconds(0), id()};
      if (!e->repeat) queue.erase(e);
      return resp;
    }
  }
  throw ScriptExhausted(req.tag);
}

std::vector<ChatRequest> ScriptedBackend::history() const {
  std::lock_guard lock(mutex_);
  return history_;
}

std::size_t ScriptedBackend::remaining(const std::string& tag) const {
  std::lock_guard lock(mutex_);
  auto it = queues_.find(tag);
  return it == queues_.end() ? 0 : it->second.size();
}

std::shared_ptr<Backend> make_backend(const BackendConfig& cfg) {
  cfg.validate();
  if (cfg.kind == BackendKind::Http) return std::make_shared<HttpChatBackend>(cfg);
  if (cfg.script_path.empty()) throw ConfigError("scripted backend needs a script file");
  return ScriptedBackend::from_file(cfg.script_path);
}

ChatResponse complete(const ChatRequest& req, const BackendConfig& cfg) {
  return make_backend(cfg)->complete(req);
}

}  // namespace stlkit::llm
