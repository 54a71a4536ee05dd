#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stlkit/llm.hpp"
#include "stlkit/pair.hpp"
#include "stlkit/prompts.hpp"
#include "stlkit/store.hpp"

namespace stlkit::datagen {

class MalformedResponse : public Error {
 public:
  using Error::Error;
};

class UnknownCandidate : public Error {
 public:
  explicit UnknownCandidate(const std::string& id)
      : Error("no queued candidate with id '" + id + "'") {}
};

struct Block {
  std::string nl;
  std::string stl;
};

/// Reads "NL: ..." / "STL: ..." blocks from model output. Labels are matched
/// case-insensitively after list markers, '#' and '*' decoration; an NL
/// sentence may continue over several lines. An NL without a following STL,
/// or an STL without an NL, counts as dropped.
struct ParsedBlocks {
  std::vector<Block> blocks;
  std::size_t dropped = 0;
};
ParsedBlocks parse_blocks(const std::string& text);

/// k exemplars from the pool (seed and accepted pairs) by k-means over pair
/// embeddings. Throws TooFewPoints.
std::vector<NLSTLPair> select_exemplars(const retrieval::KnowledgeStore& pool, std::size_t k,
                                        std::uint64_t seed);

std::string format_exemplars(const std::vector<NLSTLPair>& exemplars);

struct Generation {
  std::vector<NLSTLPair> candidates;
  std::size_t dropped = 0;
  std::vector<std::string> prompts;  // user prompt of each request
};

/// Asks the backend for new pairs with the evolve template. Candidates are
/// numbered gen-r{round}-{NNN} in response order. Throws MalformedResponse
/// when no block parses.
Generation generate_candidates(const std::vector<NLSTLPair>& exemplars, llm::Backend& backend,
                               std::size_t count, int round, const PromptSet& prompts = {},
                               std::size_t requests = 1, std::size_t jobs = 4);

struct Rejection {
  NLSTLPair pair;
  std::string reason;
  std::optional<std::string> nearest_id;  // novelty rejections only
  double score = 0;                       // novelty rejections only
};

struct FilterResult {
  std::vector<NLSTLPair> pass;
  std::vector<Rejection> fail;
};

/// Keeps candidates whose formula is well formed and rewrites their stl into
/// canonical form.
FilterResult filter_syntax(const std::vector<NLSTLPair>& candidates);

/// Keeps a candidate when its ROUGE-L against every pool sentence, and
/// against every candidate kept before it in the same batch, is below the
/// threshold.
FilterResult filter_novelty(const std::vector<NLSTLPair>& candidates,
                            const std::vector<NLSTLPair>& pool, double threshold = 0.5);

struct RoundConfig {
  std::size_t exemplars = 5;
  std::size_t candidates = 10;
  std::size_t requests = 1;
  std::size_t jobs = 4;
  std::uint64_t seed = 42;
  double novelty_threshold = 0.5;
};

struct RoundReport {
  int round = 0;
  std::size_t generated = 0;
  std::size_t syntax_rejected = 0;
  std::size_t novelty_rejected = 0;
  std::size_t queued = 0;
  std::size_t accepted = 0;  // filled in by later reviews
  std::size_t dropped_blocks = 0;
  std::vector<std::string> exemplar_ids;
  std::vector<std::string> pool_ids;  // novelty pool at filtering time
  std::vector<Rejection> rejections;

  bool reconciles() const { return generated == syntax_rejected + novelty_rejected + queued; }
};

enum class Verdict { Accept, Reject };

struct ReviewDecision {
  std::string id;
  Verdict verdict = Verdict::Accept;
  std::string reason;
  std::string reviewer = "cli";
};

void to_json(nlohmann::json& j, const Rejection& r);
void to_json(nlohmann::json& j, const RoundReport& r);
void from_json(const nlohmann::json& j, RoundReport& r);
void to_json(nlohmann::json& j, const ReviewDecision& d);
void from_json(const nlohmann::json& j, ReviewDecision& d);

/// File layout of a working dataset directory.
struct DatasetPaths {
  std::string dataset;    // every pair: seed, accepted, rejected
  std::string queue;      // candidates awaiting review
  std::string decisions;  // review log
  std::string rounds;     // one RoundReport per line
  std::string knowledge;  // pool with embeddings, for retrieval

  static DatasetPaths in(const std::string& dir);
};

/// A dataset under construction: pairs, review queue and round history.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<NLSTLPair> pairs, std::vector<NLSTLPair> queue = {},
          std::vector<RoundReport> rounds = {});

  static Dataset load(const DatasetPaths& paths);
  /// Writes every file with write-then-rename and appends new review
  /// decisions to the log.
  void save(const DatasetPaths& paths);

  /// Seed pairs become status seed, source handcrafted, round 0, with
  /// canonical stl. Throws on duplicate ids or unparseable formulas.
  static Dataset from_seeds(std::vector<NLSTLPair> seeds);

  const std::vector<NLSTLPair>& pairs() const { return pairs_; }
  const std::vector<NLSTLPair>& queue() const { return queue_; }
  const std::vector<RoundReport>& rounds() const { return rounds_; }
  const std::vector<ReviewDecision>& new_decisions() const { return new_decisions_; }

  std::vector<NLSTLPair> pool() const;
  retrieval::KnowledgeStore pool_store() const;
  int next_round() const { return static_cast<int>(rounds_.size()) + 1; }

  /// One generation round; on any error nothing changes.
  RoundReport run_round(llm::Backend& backend, const RoundConfig& cfg,
                        const PromptSet& prompts = {});

  /// Checks every id first, so an unknown id changes nothing.
  void apply_review(const std::vector<ReviewDecision>& decisions);

 private:
  std::vector<NLSTLPair> pairs_;
  std::vector<NLSTLPair> queue_;
  std::vector<RoundReport> rounds_;
  std::vector<ReviewDecision> new_decisions_;  // appended to the log on save
};

}  // namespace stlkit::datagen
