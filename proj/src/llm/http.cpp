#include <httplib.h>

#include <cstdlib>
#include <random>
#include <thread>

#include <json.hpp>

#include "stlkit/llm.hpp"

namespace stlkit::llm {

namespace {

thread_local int attempts_made = 0;

std::string scrub(std::string text, const std::string& secret) {
  if (secret.empty()) return text;
  for (auto pos = text.find(secret); pos != std::string::npos; pos = text.find(secret, pos)) {
    text.replace(pos, secret.size(), "***");
  }
  return text;
}

std::string excerpt(const std::string& body) {
  return body.size() > 200 ? body.substr(0, 200) + "..." : body;
}

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  const auto scheme = endpoint.find("://");
  const auto host_start = scheme == std::string::npos ? 0 : scheme + 3;
  const auto slash = endpoint.find('/', host_start);
  if (slash == std::string::npos) return {endpoint, ""};
  std::string base = endpoint.substr(slash);
  while (!base.empty() && base.back() == '/') base.pop_back();
  return {endpoint.substr(0, slash), base};
}

HttpChatBackend::HttpChatBackend(BackendConfig cfg, Sleeper sleeper)
    : cfg_(std::move(cfg)), sleep_(std::move(sleeper)) {
  cfg_.kind = BackendKind::Http;
  cfg_.validate();
  if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string HttpChatBackend::id() const { return "http:" + cfg_.model; }

int HttpChatBackend::last_attempts() { return attempts_made; }

ChatResponse HttpChatBackend::complete(const ChatRequest& req) {
  attempts_made = 0;
  std::string secret;
  if (!cfg_.credential_env.empty()) {
    const char* value = std::getenv(cfg_.credential_env.c_str());
    if (value == nullptr || *value == '\0') throw CredentialMissing(cfg_.credential_env);
    secret = value;
  }

  nlohmann::json body{{"model", cfg_.model},
                      {"temperature", req.temperature},
                      {"max_tokens", req.max_tokens}};
  body["messages"] = nlohmann::json::array();
  if (!req.system_prompt.empty()) {
    body["messages"].push_back({{"role", "system"}, {"content", req.system_prompt}});
  }
  body["messages"].push_back({{"role", "user"}, {"content", req.user_prompt}});
  const std::string payload = body.dump();

  const auto [host, base] = split_endpoint(cfg_.endpoint);
  httplib::Client client(host);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers;
  if (!secret.empty()) headers.emplace("Authorization", "Bearer " + secret);

  std::mt19937_64 jitter_rng(std::random_device{}());
  std::string last_error;
  bool last_was_timeout = false;
  int last_status = 0;

  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) {
      const auto base_ms = cfg_.backoff_base.count();
      auto delay = base_ms << std::min(attempt - 1, 20);
      delay = std::min<long long>(delay, cfg_.backoff_cap.count());
      const auto jitter =
          base_ms > 0 ? static_cast<long long>(jitter_rng() % static_cast<unsigned long long>(base_ms))
                      : 0;
      sleep_(std::chrono::milliseconds(delay + jitter));
    }
    ++attempts_made;
    const auto started = std::chrono::steady_clock::now();
    auto res = client.Post(base + "/chat/completions", headers, payload, "application/json");
    const auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);

    if (!res) {
      const auto err = res.error();
      last_was_timeout = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read;
      last_status = 0;
      last_error = httplib::to_string(err);
      continue;
    }
    if (res->status != 200) {
      last_status = res->status;
      last_was_timeout = false;
      last_error = scrub(excerpt(res->body), secret);
      if (retryable(res->status)) continue;
      throw HttpStatus(res->status, last_error);
    }
    try {
      const auto j = nlohmann::json::parse(res->body);
      return ChatResponse{j.at("choices").at(0).at("message").at("content").get<std::string>(),
                          latency, id()};
    } catch (const nlohmann::json::exception&) {
      throw BackendError("malformed chat-completion response: " +
                         scrub(excerpt(res->body), secret));
    }
  }
  const std::string detail = "after " + std::to_string(attempts_made) + " attempts: " + last_error;
  if (last_status != 0) throw HttpStatus(last_status, detail);
  if (last_was_timeout) throw Timeout("request timed out " + detail);
  throw BackendError("request failed " + detail);
}

}  // namespace stlkit::llm
