#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "stlkit/http_embedding.hpp"
#include "stlkit/llm.hpp"

using namespace stlkit;
using namespace stlkit::llm;

namespace {

ChatRequest request(std::string tag, std::string user = "prompt") {
  ChatRequest r;
  r.system_prompt = "system";
  r.user_prompt = std::move(user);
  r.tag = std::move(tag);
  return r;
}

/// Local chat-completions stand-in on an ephemeral port.
class StubServer {
 public:
  StubServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::string completion(const std::string& content) {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}
      .dump();
}

BackendConfig http_config(const std::string& endpoint) {
  BackendConfig cfg;
  cfg.kind = BackendKind::Http;
  cfg.endpoint = endpoint;
  cfg.model = "stub-model";
  cfg.timeout = std::chrono::milliseconds(2000);
  cfg.max_retries = 2;
  cfg.backoff_base = std::chrono::milliseconds(1);
  return cfg;
}

void no_sleep(std::chrono::milliseconds) {}

}  // namespace

TEST_SUITE("scripted backend") {
  TEST_CASE("replays an entry verbatim") {
    ScriptedBackend b({{"gen", "G[0,10](x>1)\n", std::nullopt, false}});
    CHECK(b.complete(request("gen")).text == "G[0,10](x>1)\n");
    CHECK_THROWS_AS((void)b.complete(request("gen")), ScriptExhausted);
  }

  TEST_CASE("unknown tag") {
    ScriptedBackend b;
    try {
      (void)b.complete(request("refine"));
      FAIL("expected ScriptExhausted");
    } catch (const ScriptExhausted& e) {
      CHECK(e.tag() == "refine");
    }
  }

  TEST_CASE("match and repeat") {
    ScriptedBackend b({{"t", "for-a", std::string("alpha"), false},
                       {"t", "any", std::nullopt, true}});
    CHECK(b.complete(request("t", "beta")).text == "any");
    CHECK(b.complete(request("t", "the alpha case")).text == "for-a");
    CHECK(b.complete(request("t", "the alpha case")).text == "any");
    CHECK(b.remaining("t") == 1);
    CHECK(b.history().size() == 3);
  }

  TEST_CASE("JSON Lines script and determinism") {
    const std::string script =
        "{\"tag\":\"gen\",\"response\":\"one\"}\n\n{\"tag\":\"gen\",\"response\":\"two\"}\n"
        "{\"tag\":\"ref\",\"response\":\"r\",\"match\":\"x\"}\n";
    for (int run = 0; run < 3; ++run) {
      auto b = ScriptedBackend::from_jsonl(script);
      CHECK(b->complete(request("gen")).text == "one");
      CHECK(b->complete(request("ref", "x")).text == "r");
      CHECK(b->complete(request("gen")).text == "two");
    }
    CHECK_THROWS_AS((void)ScriptedBackend::from_jsonl("{\"tag\":1}"), ConfigError);
  }

  TEST_CASE("config validation") {
    BackendConfig cfg;
    cfg.kind = BackendKind::Http;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.endpoint = "http://localhost:1";
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.model = "m";
    CHECK_NOTHROW(cfg.validate());
    CHECK_THROWS_AS((void)make_backend(BackendConfig{}), ConfigError);
  }

  TEST_CASE("endpoint splitting") {
    CHECK(split_endpoint("https://api.example.com/v1/") ==
          std::pair<std::string, std::string>{"https://api.example.com", "/v1"});
    CHECK(split_endpoint("http://127.0.0.1:8080") ==
          std::pair<std::string, std::string>{"http://127.0.0.1:8080", ""});
  }
}

TEST_SUITE("http backend") {
  TEST_CASE("returns the assistant message of a stub server") {
    StubServer stub;
    nlohmann::json seen;
    std::string auth;
    stub.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
      seen = nlohmann::json::parse(req.body);
      auth = req.get_header_value("Authorization");
      res.set_content(completion("F[0,5](y < 2)"), "application/json");
    });
    ::setenv("STLKIT_TEST_KEY", "sk-test-123", 1);
    auto cfg = http_config(stub.endpoint());
    cfg.credential_env = "STLKIT_TEST_KEY";
    HttpChatBackend backend(cfg, no_sleep);
    const auto resp = backend.complete(request("gen", "translate this"));
    CHECK(resp.text == "F[0,5](y < 2)");
    CHECK(resp.backend_id == "http:stub-model");
    CHECK(auth == "Bearer sk-test-123");
    CHECK(seen["model"] == "stub-model");
    CHECK(seen["temperature"] == 0.0);
    CHECK(seen["messages"].size() == 2);
    CHECK(seen["messages"][1]["content"] == "translate this");
    ::unsetenv("STLKIT_TEST_KEY");
  }

  TEST_CASE("retries server errors up to the limit") {
    StubServer stub;
    std::atomic<int> calls{0};
    stub.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
      if (++calls < 3) {
        res.status = 503;
        return;
      }
      res.set_content(completion("ok"), "application/json");
    });
    std::vector<std::chrono::milliseconds> sleeps;
    HttpChatBackend backend(http_config(stub.endpoint()),
                            [&](std::chrono::milliseconds d) { sleeps.push_back(d); });
    CHECK(backend.complete(request("gen")).text == "ok");
    CHECK(calls == 3);
    CHECK(HttpChatBackend::last_attempts() == 3);
    REQUIRE(sleeps.size() == 2);
    CHECK(sleeps[0].count() >= 1);
    CHECK(sleeps[1].count() >= 2);

    calls = -10;
    try {
      (void)backend.complete(request("gen"));
      FAIL("expected HttpStatus");
    } catch (const HttpStatus& e) {
      CHECK(e.code() == 503);
    }
    CHECK(HttpChatBackend::last_attempts() == 3);
  }

  TEST_CASE("client errors are not retried and never leak the key") {
    StubServer stub;
    std::atomic<int> calls{0};
    stub.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
      ++calls;
      res.status = 401;
      res.set_content("bad key " + req.get_header_value("Authorization"), "text/plain");
    });
    ::setenv("STLKIT_TEST_KEY", "sk-secret-value", 1);
    auto cfg = http_config(stub.endpoint());
    cfg.credential_env = "STLKIT_TEST_KEY";
    HttpChatBackend backend(cfg, no_sleep);
    try {
      (void)backend.complete(request("gen"));
      FAIL("expected HttpStatus");
    } catch (const HttpStatus& e) {
      CHECK(e.code() == 401);
      CHECK(std::string(e.what()).find("sk-secret-value") == std::string::npos);
    }
    CHECK(calls == 1);
    ::unsetenv("STLKIT_TEST_KEY");
  }

  TEST_CASE("missing credential") {
    auto cfg = http_config("http://127.0.0.1:9");
    cfg.credential_env = "STLKIT_TEST_UNSET_KEY";
    ::unsetenv("STLKIT_TEST_UNSET_KEY");
    HttpChatBackend backend(cfg, no_sleep);
    CHECK_THROWS_AS((void)backend.complete(request("gen")), CredentialMissing);
  }

  TEST_CASE("slow server times out") {
    StubServer stub;
    stub.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
      std::this_thread::sleep_for(std::chrono::milliseconds(600));
      res.set_content(completion("late"), "application/json");
    });
    auto cfg = http_config(stub.endpoint());
    cfg.timeout = std::chrono::milliseconds(150);
    cfg.max_retries = 1;
    HttpChatBackend backend(cfg, no_sleep);
    CHECK_THROWS_AS((void)backend.complete(request("gen")), Timeout);
    CHECK(HttpChatBackend::last_attempts() == 2);
  }

  TEST_CASE("malformed body") {
    StubServer stub;
    stub.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
      res.set_content("{\"choices\": []}", "application/json");
    });
    HttpChatBackend backend(http_config(stub.endpoint()), no_sleep);
    CHECK_THROWS_AS((void)backend.complete(request("gen")), BackendError);
  }

  TEST_CASE("embedding provider") {
    StubServer stub;
    stub.server().Post("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
      const auto input = nlohmann::json::parse(req.body)["input"].get<std::string>();
      const double len = static_cast<double>(input.size());
      res.set_content(nlohmann::json{{"data", {{{"embedding", {3.0, 4.0 * len}}}}}}.dump(),
                      "application/json");
    });
    HttpEmbeddingProvider provider(http_config(stub.endpoint()));
    provider.fit({"a"});
    CHECK(provider.dim() == 2);
    const auto v = provider.embed("a");
    CHECK(v[0] == doctest::Approx(0.6));
    CHECK(v[1] == doctest::Approx(0.8));
  }
}
