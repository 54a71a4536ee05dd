#include "settings.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

namespace stlkit::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string env_name(const std::string& key) {
  std::string out = "STLKIT_";
  for (char c : key) {
    out += (c == '.' || c == '-') ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

long to_long(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw llm::ConfigError("setting '" + key + "' must be an integer, got '" + value + "'");
  }
}

}  // namespace

std::optional<std::string> system_getenv(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (v == nullptr) return std::nullopt;
  return std::string(v);
}

std::map<std::string, std::string> Settings::parse_file_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw llm::ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

std::optional<std::string> Settings::env(const std::string& key) const {
  const auto fn = getenv_ ? getenv_ : system_getenv;
  auto v = fn(env_name(key));
  if (v && v->empty()) return std::nullopt;
  return v;
}

std::optional<std::string> Settings::get(const std::string& key, const std::string& role) const {
  std::vector<std::string> keys;
  if (!role.empty()) keys.push_back(role + "." + key);
  keys.push_back(key);
  for (const auto& k : keys) {
    if (auto it = flags_.find(k); it != flags_.end()) return it->second;
  }
  for (const auto& k : keys) {
    if (auto v = env(k)) return v;
  }
  for (const auto& k : keys) {
    if (auto it = file_.find(k); it != file_.end()) return it->second;
  }
  return std::nullopt;
}

llm::BackendConfig Settings::backend(const std::string& role) const {
  llm::BackendConfig cfg;
  const auto kind = get("backend", role);
  const auto script = get("script", role);
  if (kind) {
    if (*kind == "scripted") {
      cfg.kind = llm::BackendKind::Scripted;
    } else if (*kind == "http") {
      cfg.kind = llm::BackendKind::Http;
    } else {
      throw llm::ConfigError("backend must be scripted or http, got '" + *kind + "'");
    }
  } else if (script) {
    cfg.kind = llm::BackendKind::Scripted;
  } else {
    throw llm::ConfigError("no backend configured for " + role +
                           " (set backend and script, or backend, endpoint and model)");
  }
  cfg.script_path = script.value_or("");
  cfg.endpoint = get("endpoint", role).value_or("");
  cfg.model = get("model", role).value_or("");
  cfg.credential_env = get("credential_env", role).value_or("");
  if (auto v = get("timeout_ms", role)) cfg.timeout = std::chrono::milliseconds(to_long("timeout_ms", *v));
  if (auto v = get("max_retries", role)) cfg.max_retries = static_cast<int>(to_long("max_retries", *v));
  cfg.validate();
  return cfg;
}

}  // namespace stlkit::cli
