#include <doctest.h>

#include "settings.hpp"

using namespace stlkit;
using stlkit::cli::Settings;

namespace {

std::optional<std::string> fake_env(const std::string& name) {
  if (name == "STLKIT_MODEL") return std::string("env-model");
  if (name == "STLKIT_REFINER_ENDPOINT") return std::string("http://env-refiner/v1");
  if (name == "STLKIT_EMPTY") return std::string("");
  return std::nullopt;
}

std::optional<std::string> no_env(const std::string&) { return std::nullopt; }

}  // namespace

TEST_SUITE("settings") {
  TEST_CASE("file syntax") {
    const auto m = Settings::parse_file_text(
        "# comment\nbackend = http\n\n endpoint=http://x/v1 # trailing\nrefiner.model = big\n");
    CHECK(m.size() == 3);
    CHECK(m.at("backend") == "http");
    CHECK(m.at("endpoint") == "http://x/v1");
    CHECK(m.at("refiner.model") == "big");
    CHECK_THROWS_AS((void)Settings::parse_file_text("just words"), llm::ConfigError);
  }

  TEST_CASE("flags beat environment beats file") {
    Settings s;
    s.set_getenv(fake_env);
    s.set_file({{"model", "file-model"}, {"endpoint", "http://file/v1"}, {"empty", "from-file"}});
    CHECK(s.get("model") == "env-model");
    CHECK(s.get("endpoint") == "http://file/v1");
    CHECK(s.get("endpoint", "refiner") == "http://env-refiner/v1");
    CHECK(s.get("empty") == "from-file");
    s.set_flag("model", "flag-model");
    CHECK(s.get("model") == "flag-model");
    CHECK_FALSE(s.get("missing").has_value());
  }

  TEST_CASE("role keys win inside a layer") {
    Settings s;
    s.set_getenv(no_env);
    s.set_file({{"script", "shared.jsonl"}, {"generator.script", "gen.jsonl"}});
    CHECK(s.get("script", "generator") == "gen.jsonl");
    CHECK(s.get("script", "refiner") == "shared.jsonl");
  }

  TEST_CASE("backend configs") {
    Settings s;
    s.set_getenv(no_env);
    CHECK_THROWS_AS((void)s.backend("generator"), llm::ConfigError);
    s.set_file({{"script", "fx.jsonl"}});
    const auto scripted = s.backend("generator");
    CHECK(scripted.kind == llm::BackendKind::Scripted);
    CHECK(scripted.script_path == "fx.jsonl");

    s.set_file({{"backend", "http"},
                {"endpoint", "https://api.example.com/v1"},
                {"model", "m"},
                {"credential_env", "MY_KEY"},
                {"timeout_ms", "1500"},
                {"max_retries", "5"}});
    const auto http = s.backend("refiner");
    CHECK(http.kind == llm::BackendKind::Http);
    CHECK(http.credential_env == "MY_KEY");
    CHECK(http.timeout.count() == 1500);
    CHECK(http.max_retries == 5);

    s.set_flag("timeout_ms", "soon");
    CHECK_THROWS_AS((void)s.backend("refiner"), llm::ConfigError);
    s.set_flag("timeout_ms", "100");
    s.set_flag("backend", "carrier-pigeon");
    CHECK_THROWS_AS((void)s.backend("refiner"), llm::ConfigError);
  }
}
