#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stlkit/ast.hpp"
#include "stlkit/llm.hpp"
#include "stlkit/metrics.hpp"
#include "stlkit/pair.hpp"
#include "stlkit/prompts.hpp"
#include "stlkit/store.hpp"

namespace stlkit::kgst {

enum class Mode {
  Kgst,        // generate, retrieve, refine
  NoFinetune,  // in-context generation from retrieved references only
  NoRefine,    // generator only
  SelfRefine,  // generate, then feedback and refine without references
};

std::string to_string(Mode m);
Mode parse_mode(const std::string& text);  // throws Error

/// One backend call as sent and received.
struct Exchange {
  std::string stage;  // generate, in_context, refine, feedback, self_refine
  std::string system_prompt;
  std::string user_prompt;
  std::string response;
};

struct TransformRequest {
  std::string nl;
  std::size_t k = 5;
  std::size_t iterations = 1;
  Mode mode = Mode::Kgst;
};

struct TransformResult {
  std::string preliminary;
  bool preliminary_valid = true;
  std::vector<retrieval::ScoredPair> references;
  std::string refined;
  stl::Formula final = stl::Formula::top();
  bool fallback_used = false;
  std::vector<Exchange> transcript;
};

/// The generator gave no well-formed formula within the attempt budget.
class AllRetriesInvalid : public Error {
 public:
  AllRetriesInvalid(std::string last_output, std::vector<Exchange> transcript);
  const std::string& last_output() const { return last_output_; }
  const std::vector<Exchange>& transcript() const { return transcript_; }

 private:
  std::string last_output_;
  std::vector<Exchange> transcript_;
};

/// A transform that could not finish. backend() tells a failed backend call
/// apart from a run where no stage produced a valid formula.
class TransformError : public Error {
 public:
  TransformError(const std::string& what, bool backend, std::vector<Exchange> transcript);
  bool backend() const { return backend_; }
  const std::vector<Exchange>& transcript() const { return transcript_; }

 private:
  bool backend_;
  std::vector<Exchange> transcript_;
};

/// First line that passes the syntax check, looking inside ``` fences before
/// the remaining lines. Label prefixes such as "STL:", backticks, '$' and a
/// trailing period are removed first.
std::optional<std::string> extract_formula(const std::string& text);

/// Asks the generator up to `attempts` times. Throws AllRetriesInvalid.
std::string generate_preliminary(const std::string& nl, llm::Backend& generator,
                                 std::vector<Exchange>& transcript, const PromptSet& prompts = {},
                                 std::size_t attempts = 3);

/// Nearest pairs by NL similarity; empty for an empty store or k = 0.
std::vector<retrieval::ScoredPair> retrieve_references(const std::string& nl,
                                                       const retrieval::KnowledgeStore& store,
                                                       std::size_t k);

/// "NL: ...\nSTL: ..." blocks, one per reference.
std::string format_references(const std::vector<retrieval::ScoredPair>& refs);

struct Refinement {
  std::string formula;
  bool fallback = false;  // refiner output unusable, input returned
};

Refinement refine(const std::string& nl, const std::string& preliminary,
                  const std::vector<retrieval::ScoredPair>& references, llm::Backend& refiner,
                  std::vector<Exchange>& transcript, const PromptSet& prompts = {});

/// Feedback call, then a refine call that sees the feedback.
Refinement self_refine(const std::string& nl, const std::string& preliminary,
                       llm::Backend& backend, std::vector<Exchange>& transcript,
                       const PromptSet& prompts = {});

/// Runs the stages of req.mode. Throws TransformError; its transcript covers
/// every call made before the failure.
TransformResult transform(const TransformRequest& req, llm::Backend& generator,
                          llm::Backend& refiner, const retrieval::KnowledgeStore& store,
                          const PromptSet& prompts = {});

void to_json(nlohmann::json& j, const Exchange& e);
/// Set include_transcript to false to leave the exchanges out.
nlohmann::json result_json(const TransformResult& r, bool include_transcript = true);

struct BenchOptions {
  Mode mode = Mode::Kgst;
  std::size_t k = 5;
  std::size_t iterations = 1;
  std::size_t jobs = 4;
};

struct BenchRecord {
  std::string id;
  std::string nl;
  std::string reference;
  std::string prediction;  // empty when the transform failed
  bool fallback_used = false;
  std::optional<std::string> error;
};

struct BenchReport {
  BenchOptions options;
  std::vector<BenchRecord> records;
  metrics::EvalReport eval;
};

/// Transforms every pair and scores the finals against the pair formulas.
/// Per-pair failures are recorded and scored as unparseable predictions.
BenchReport bench(const std::vector<NLSTLPair>& dataset, const BenchOptions& opts,
                  llm::Backend& generator, llm::Backend& refiner,
                  const retrieval::KnowledgeStore& store, const PromptSet& prompts = {});

nlohmann::json bench_json(const BenchReport& report);

}  // namespace stlkit::kgst
