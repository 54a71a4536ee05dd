#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "stlkit/ast.hpp"

namespace stlkit {

enum class PairSource { Handcrafted, Generated };
enum class PairStatus { Seed, Candidate, Accepted, Rejected };

std::string to_string(PairSource s);
std::string to_string(PairStatus s);
PairSource parse_source(const std::string& s);
PairStatus parse_status(const std::string& s);

/// One natural-language requirement with its formula.
struct NLSTLPair {
  std::string id;
  std::string nl;
  std::string stl;
  std::string domain = "other";
  PairSource source = PairSource::Handcrafted;
  int round = 0;
  PairStatus status = PairStatus::Seed;

  /// Parses stl; throws ParseError / LexError.
  stl::Formula formula() const;

  friend bool operator==(const NLSTLPair&, const NLSTLPair&) = default;
};

/// Seed and accepted pairs form the pool used for exemplars, novelty and
/// retrieval.
bool in_pool(const NLSTLPair& p);

/// Rewrites stl into canonical form; throws if it does not parse.
void canonicalize(NLSTLPair& p);

void to_json(nlohmann::json& j, const NLSTLPair& p);
void from_json(const nlohmann::json& j, NLSTLPair& p);

/// JSON Lines, one pair per line. Blank lines are skipped; a malformed line
/// throws Error naming the file and line.
std::vector<NLSTLPair> load_pairs(const std::string& path);
std::vector<NLSTLPair> parse_pairs(const std::string& text, const std::string& origin = "<input>");
std::string dump_pairs(const std::vector<NLSTLPair>& pairs);
void save_pairs(const std::string& path, const std::vector<NLSTLPair>& pairs);

}  // namespace stlkit
