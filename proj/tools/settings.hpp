#pragma once

#include <map>
#include <optional>
#include <string>

#include "stlkit/llm.hpp"

namespace stlkit::cli {

/// Layered key-value settings. Lookups try command-line flags, then the
/// environment, then the config file. Within a layer a role-qualified key
/// ("refiner.model") wins over the plain key ("model").
class Settings {
 public:
  using Getenv = std::optional<std::string> (*)(const std::string&);

  /// "key = value" lines; '#' starts a comment. Throws llm::ConfigError on
  /// a line without '='.
  static std::map<std::string, std::string> parse_file_text(const std::string& text);

  void set_file(std::map<std::string, std::string> values) { file_ = std::move(values); }
  void set_flag(const std::string& key, const std::string& value) { flags_[key] = value; }
  void set_getenv(Getenv fn) { getenv_ = fn; }

  /// Environment names: STLKIT_<ROLE>_<KEY> and STLKIT_<KEY>, upper case,
  /// with '.' and '-' turned into '_'.
  std::optional<std::string> get(const std::string& key, const std::string& role = "") const;

  /// Backend for a role ("generator", "refiner", "datagen"). A missing
  /// backend kind with a script path means scripted.
  llm::BackendConfig backend(const std::string& role) const;

 private:
  std::optional<std::string> env(const std::string& key) const;

  std::map<std::string, std::string> flags_;
  std::map<std::string, std::string> file_;
  Getenv getenv_ = nullptr;
};

std::optional<std::string> system_getenv(const std::string& name);

}  // namespace stlkit::cli
