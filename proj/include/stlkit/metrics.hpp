#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stlkit/token.hpp"

namespace stlkit::metrics {

class LengthMismatch : public Error {
 public:
  LengthMismatch(std::size_t refs, std::size_t preds);
};

/// One aligned position where reference and prediction disagree. A missing
/// side means the other sequence is longer.
struct TokenDiff {
  std::size_t position = 0;
  std::optional<stl::Token> ref;
  std::optional<stl::Token> pred;
};

/// Which kinds of mistake a prediction makes. A pair can fall into several
/// buckets, except that an unparseable prediction is only a parse failure.
struct ErrorBuckets {
  std::size_t operator_token = 0;
  std::size_t numeric_token = 0;
  std::size_t parse_failure = 0;
  std::size_t template_mismatch = 0;

  ErrorBuckets& operator+=(const ErrorBuckets& o);
  friend bool operator==(const ErrorBuckets&, const ErrorBuckets&) = default;
};

struct PairScore {
  double formula_accuracy = 0;
  double template_accuracy = 0;
  std::vector<TokenDiff> token_diff;
  std::vector<std::string> diagnostics;
  ErrorBuckets buckets;
};

struct EvalReport {
  std::vector<PairScore> pairs;
  double formula_accuracy = 0;  // mean over pairs
  double template_accuracy = 0;  // mean over pairs
  double bleu = 0;              // corpus level
  ErrorBuckets buckets;         // summed over pairs
};

/// Positional token agreement: matches over max(|ref|, |pred|). Two empty
/// strings score 1; a string that fails to tokenize scores 0.
double formula_accuracy(const std::string& ref, const std::string& pred);

/// formula_accuracy over the rendered templates; 0 when either side fails
/// to parse.
double template_accuracy(const std::string& ref, const std::string& pred);

/// Corpus BLEU over formula tokens with n-grams up to 4, uniform weights and
/// the usual brevity penalty. An order n >= 2 with no matching n-gram uses
/// 1 / (candidates + 1) as its precision; no unigram match at all scores 0.
/// Text that does not tokenize falls back to whitespace splitting.
double bleu(const std::vector<std::string>& refs, const std::vector<std::string>& preds);

/// ROUGE-L F1 (beta = 1) over lowercased words with surrounding
/// punctuation removed. 0 if either side has no words.
double rouge_l(const std::string& a, const std::string& b);

/// Lowercased words with leading and trailing punctuation stripped.
std::vector<std::string> words(const std::string& text);

/// Both accuracies are 0 when the prediction does not parse.
PairScore score_pair(const std::string& ref, const std::string& pred);

/// Per-pair scores plus corpus means, BLEU and bucket totals.
EvalReport score_corpus(const std::vector<std::string>& refs,
                        const std::vector<std::string>& preds);

}  // namespace stlkit::metrics
