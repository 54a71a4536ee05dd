#pragma once

#include <map>
#include <string>

#include "stlkit/error.hpp"

namespace stlkit {

/// System and user halves of a prompt template. In a template file the two
/// halves are separated by a line holding only "---".
struct PromptTemplate {
  std::string system;
  std::string user;
};

class PromptError : public Error {
 public:
  using Error::Error;
};

/// Replaces every {name} with vars.at(name). "{{" and "}}" produce literal
/// braces. Throws PromptError for a placeholder without a value.
std::string render(const std::string& tmpl, const std::map<std::string, std::string>& vars);

PromptTemplate parse_prompt(const std::string& text);

/// Templates by name: evolve, generate, refine, in_context, feedback,
/// self_refine. Built-in copies are compiled from the prompts/ directory;
/// a directory given here overrides the ones it contains.
class PromptSet {
 public:
  PromptSet();
  static PromptSet from_directory(const std::string& dir);

  const PromptTemplate& get(const std::string& name) const;
  void set(const std::string& name, PromptTemplate t) { templates_[name] = std::move(t); }

 private:
  std::map<std::string, PromptTemplate> templates_;
};

/// Built-in template text by name (the raw file contents).
const std::map<std::string, std::string>& builtin_prompts();

}  // namespace stlkit
