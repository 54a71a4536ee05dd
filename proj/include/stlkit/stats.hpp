#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "stlkit/error.hpp"
#include "stlkit/pair.hpp"

namespace stlkit::stats {

class ParseFailure : public Error {
 public:
  ParseFailure(const std::string& id, const std::string& detail)
      : Error("pair '" + id + "' does not parse: " + detail), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

/// Mean and median of a sample; the median of an even count is the midpoint
/// of the two middle values. Both are 0 for an empty sample.
struct Summary {
  double average = 0;
  double median = 0;
};

Summary summarize(std::vector<double> values);

struct FormulaStats {
  Summary subformulas_per_formula;  // every node, atoms included
  Summary operators_per_formula;
  double ngram_diversity = 0;  // over formula tokens
};

struct TextStats {
  std::size_t unique_sentences = 0;
  std::size_t unique_words = 0;
  Summary words_per_sentence;
  double ngram_diversity = 0;  // over words
};

struct IdentifierStats {
  Summary chars_per_identifier;  // per identifier occurrence
  Summary digits_per_constant;   // per number token, bounds included
  double identifiers_per_formula = 0;  // occurrences, averaged over pairs
};

struct CorpusStats {
  std::size_t pairs = 0;
  std::size_t ngram_order = 3;
  FormulaStats formula;
  TextStats text;
  IdentifierStats identifiers;
};

/// Mean over n = 1..n_max of H_n / n, where H_n is the Shannon entropy in
/// bits of the pooled n-gram distribution of all sequences. An order with no
/// n-grams contributes 0. Throws Error for n_max < 1.
double ngram_diversity(const std::vector<std::vector<std::string>>& sequences,
                       std::size_t n_max = 3);

/// Throws ParseFailure naming the first pair whose formula does not parse.
CorpusStats compute_stats(const std::vector<NLSTLPair>& pairs, std::size_t n_max = 3);

/// Report with a metadata block naming the measures this toolkit defines
/// itself.
nlohmann::json to_json(const CorpusStats& s);

/// Plain-text table in three parts: formula, text, identifiers.
std::string render_table(const CorpusStats& s, const std::string& name = "dataset");

}  // namespace stlkit::stats
