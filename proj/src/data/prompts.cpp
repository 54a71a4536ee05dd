#include "stlkit/prompts.hpp"

#include <filesystem>

#include "stlkit/io.hpp"

namespace stlkit {

std::string render(const std::string& tmpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size());
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    const char c = tmpl[i];
    if ((c == '{' || c == '}') && i + 1 < tmpl.size() && tmpl[i + 1] == c) {
      out += c;
      ++i;
      continue;
    }
    if (c != '{') {
      out += c;
      continue;
    }
    const auto close = tmpl.find('}', i);
    if (close == std::string::npos) throw PromptError("unterminated placeholder in template");
    const std::string name = tmpl.substr(i + 1, close - i - 1);
    auto it = vars.find(name);
    if (it == vars.end()) throw PromptError("no value for placeholder {" + name + "}");
    out += it->second;
    i = close;
  }
  return out;
}

PromptTemplate parse_prompt(const std::string& text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "---") {
      std::string system = text.substr(0, pos);
      while (!system.empty() && (system.back() == '\n' || system.back() == '\r')) system.pop_back();
      std::string user = eol < text.size() ? text.substr(eol + 1) : "";
      while (!user.empty() && user.back() == '\n') user.pop_back();
      return {system, user};
    }
    pos = eol + 1;
  }
  std::string user = text;
  while (!user.empty() && user.back() == '\n') user.pop_back();
  return {"", user};
}

PromptSet::PromptSet() {
  for (const auto& [name, text] : builtin_prompts()) templates_[name] = parse_prompt(text);
}

PromptSet PromptSet::from_directory(const std::string& dir) {
  PromptSet set;
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("prompt directory '" + dir + "' does not exist");
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".txt") continue;
    set.set(entry.path().stem().string(), parse_prompt(read_file(entry.path().string())));
  }
  return set;
}

const PromptTemplate& PromptSet::get(const std::string& name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) throw PromptError("unknown prompt template '" + name + "'");
  return it->second;
}

}  // namespace stlkit
