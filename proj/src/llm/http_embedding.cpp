#include "stlkit/http_embedding.hpp"

#include <httplib.h>

#include <cmath>
#include <cstdlib>
#include <thread>

#include <json.hpp>

namespace stlkit::llm {

HttpEmbeddingProvider::HttpEmbeddingProvider(BackendConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.kind = BackendKind::Http;
  cfg_.validate();
}

void HttpEmbeddingProvider::fit(const std::vector<std::string>& documents) {
  if (documents.empty()) return;
  dim_ = embed(documents.front()).size();
}

retrieval::Vector HttpEmbeddingProvider::embed(const std::string& text) const {
  std::string secret;
  if (!cfg_.credential_env.empty()) {
    const char* value = std::getenv(cfg_.credential_env.c_str());
    if (value == nullptr || *value == '\0') throw CredentialMissing(cfg_.credential_env);
    secret = value;
  }
  const auto [host, base] = split_endpoint(cfg_.endpoint);
  httplib::Client client(host);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg_.timeout).count();
  client.set_connection_timeout(secs);
  client.set_read_timeout(secs);
  httplib::Headers headers;
  if (!secret.empty()) headers.emplace("Authorization", "Bearer " + secret);
  const nlohmann::json body{{"model", cfg_.model}, {"input", text}};

  for (int attempt = 0;; ++attempt) {
    auto res = client.Post(base + "/embeddings", headers, body.dump(), "application/json");
    const bool retry = !res || res->status == 429 || res->status >= 500;
    if (retry && attempt < cfg_.max_retries) {
      const auto delay = std::min<long long>(cfg_.backoff_base.count() << std::min(attempt, 20),
                                             cfg_.backoff_cap.count());
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
      continue;
    }
    if (!res) throw retrieval::ProviderError("embedding request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) {
      throw retrieval::ProviderError("embedding request returned HTTP " + std::to_string(res->status));
    }
    try {
      auto v = nlohmann::json::parse(res->body).at("data").at(0).at("embedding").get<retrieval::Vector>();
      double norm = 0;
      for (double x : v) norm += x * x;
      norm = std::sqrt(norm);
      if (norm > 0) {
        for (auto& x : v) x /= norm;
      }
      return v;
    } catch (const nlohmann::json::exception&) {
      throw retrieval::ProviderError("malformed embedding response");
    }
  }
}

std::string HttpEmbeddingProvider::fingerprint() const {
  return "http-embedding/" + cfg_.endpoint + "/" + cfg_.model;
}

}  // namespace stlkit::llm
