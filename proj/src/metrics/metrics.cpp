#include "stlkit/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "stlkit/analysis.hpp"
#include "stlkit/parser.hpp"

namespace stlkit::metrics {

using stl::Token;
using stl::TokenKind;

LengthMismatch::LengthMismatch(std::size_t refs, std::size_t preds)
    : Error("reference and prediction lists differ in length (" + std::to_string(refs) +
            " vs " + std::to_string(preds) + ")") {}

ErrorBuckets& ErrorBuckets::operator+=(const ErrorBuckets& o) {
  operator_token += o.operator_token;
  numeric_token += o.numeric_token;
  parse_failure += o.parse_failure;
  template_mismatch += o.template_mismatch;
  return *this;
}

namespace {

double aligned_accuracy(const std::vector<Token>& ref, const std::vector<Token>& pred) {
  const std::size_t longest = std::max(ref.size(), pred.size());
  if (longest == 0) return 1.0;
  std::size_t matches = 0;
  for (std::size_t i = 0; i < std::min(ref.size(), pred.size()); ++i) {
    if (ref[i] == pred[i]) ++matches;
  }
  return static_cast<double>(matches) / static_cast<double>(longest);
}

std::optional<std::vector<Token>> try_tokenize(const std::string& text) {
  try {
    return stl::tokenize(text);
  } catch (const LexError&) {
    return std::nullopt;
  }
}

std::optional<std::string> try_template(const std::string& text) {
  try {
    return stl::format(stl::extract_template(stl::parse(text)));
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::vector<std::string> split_ws(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::vector<std::string> metric_tokens(const std::string& text) {
  if (auto toks = try_tokenize(text)) {
    std::vector<std::string> out;
    out.reserve(toks->size());
    // Kind and lexeme both take part in equality, so key on both.
    for (const auto& t : *toks) {
      out.push_back(std::string(stl::to_string(t.kind)) + '\x1f' + t.lexeme);
    }
    return out;
  }
  return split_ws(text);
}

using Gram = std::vector<std::string>;

std::map<Gram, std::size_t> ngram_counts(const std::vector<std::string>& toks, std::size_t n) {
  std::map<Gram, std::size_t> counts;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    ++counts[Gram(toks.begin() + static_cast<std::ptrdiff_t>(i),
                  toks.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

bool is_word_char(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

}  // namespace

double formula_accuracy(const std::string& ref, const std::string& pred) {
  const auto r = try_tokenize(ref);
  const auto p = try_tokenize(pred);
  if (!r || !p) return 0.0;
  return aligned_accuracy(*r, *p);
}

double template_accuracy(const std::string& ref, const std::string& pred) {
  const auto r = try_template(ref);
  const auto p = try_template(pred);
  if (!r || !p) return 0.0;
  return formula_accuracy(*r, *p);
}

double bleu(const std::vector<std::string>& refs, const std::vector<std::string>& preds) {
  if (refs.size() != preds.size() || refs.empty()) {
    throw LengthMismatch(refs.size(), preds.size());
  }
  constexpr std::size_t kMaxOrder = 4;
  std::size_t matches[kMaxOrder + 1] = {};
  std::size_t candidates[kMaxOrder + 1] = {};
  std::size_t ref_len = 0;
  std::size_t pred_len = 0;

  for (std::size_t i = 0; i < refs.size(); ++i) {
    const auto r = metric_tokens(refs[i]);
    const auto p = metric_tokens(preds[i]);
    ref_len += r.size();
    pred_len += p.size();
    for (std::size_t n = 1; n <= kMaxOrder; ++n) {
      const auto rc = ngram_counts(r, n);
      for (const auto& [gram, count] : ngram_counts(p, n)) {
        candidates[n] += count;
        if (auto it = rc.find(gram); it != rc.end()) matches[n] += std::min(count, it->second);
      }
    }
  }
  if (pred_len == 0 || matches[1] == 0) return 0.0;

  double log_sum = 0;
  for (std::size_t n = 1; n <= kMaxOrder; ++n) {
    const double p = matches[n] > 0
                         ? static_cast<double>(matches[n]) / static_cast<double>(candidates[n])
                         : 1.0 / static_cast<double>(candidates[n] + 1);
    log_sum += std::log(p);
  }
  const double brevity =
      pred_len >= ref_len
          ? 1.0
          : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(pred_len));
  return brevity * std::exp(log_sum / kMaxOrder);
}

std::vector<std::string> words(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& raw : split_ws(text)) {
    std::size_t b = 0;
    std::size_t e = raw.size();
    while (b < e && !is_word_char(static_cast<unsigned char>(raw[b]))) ++b;
    while (e > b && !is_word_char(static_cast<unsigned char>(raw[e - 1]))) --e;
    if (b == e) continue;
    std::string w = raw.substr(b, e - b);
    for (auto& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.push_back(std::move(w));
  }
  return out;
}

double rouge_l(const std::string& a, const std::string& b) {
  const auto x = words(a);
  const auto y = words(b);
  if (x.empty() || y.empty()) return 0.0;
  std::vector<std::size_t> prev(y.size() + 1, 0), cur(y.size() + 1, 0);
  for (std::size_t i = 1; i <= x.size(); ++i) {
    for (std::size_t j = 1; j <= y.size(); ++j) {
      cur[j] = x[i - 1] == y[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  const double lcs = static_cast<double>(prev[y.size()]);
  if (lcs == 0) return 0.0;
  const double precision = lcs / static_cast<double>(y.size());
  const double recall = lcs / static_cast<double>(x.size());
  return 2 * precision * recall / (precision + recall);
}

PairScore score_pair(const std::string& ref, const std::string& pred) {
  PairScore score;
  const auto r = try_tokenize(ref);
  const auto p = try_tokenize(pred);
  if (!r) score.diagnostics.push_back("reference does not tokenize");
  if (!p) score.diagnostics.push_back("prediction does not tokenize");

  if (r && p) {
    score.formula_accuracy = aligned_accuracy(*r, *p);
    const std::size_t longest = std::max(r->size(), p->size());
    for (std::size_t i = 0; i < longest; ++i) {
      TokenDiff d{i, std::nullopt, std::nullopt};
      if (i < r->size()) d.ref = (*r)[i];
      if (i < p->size()) d.pred = (*p)[i];
      if (d.ref && d.pred && *d.ref == *d.pred) continue;
      score.token_diff.push_back(std::move(d));
    }
  }

  const auto rt = try_template(ref);
  std::optional<std::string> pt;
  try {
    pt = stl::format(stl::extract_template(stl::parse(pred)));
  } catch (const Error& e) {
    score.diagnostics.push_back(std::string("prediction does not parse: ") + e.what());
  }
  if (!rt) score.diagnostics.push_back("reference does not parse");

  if (!pt) {
    // A prediction that is not a formula earns nothing, even where some of
    // its tokens happen to line up.
    score.formula_accuracy = 0;
    score.buckets.parse_failure = 1;
    return score;
  }
  if (rt) {
    score.template_accuracy = formula_accuracy(*rt, *pt);
    if (*rt != *pt) score.buckets.template_mismatch = 1;
  }
  for (const auto& d : score.token_diff) {
    const bool op = (d.ref && stl::is_operator(d.ref->kind)) ||
                    (d.pred && stl::is_operator(d.pred->kind));
    if (op) score.buckets.operator_token = 1;
    if (d.ref && d.pred && d.ref->kind == TokenKind::Number &&
        d.pred->kind == TokenKind::Number) {
      score.buckets.numeric_token = 1;
    }
  }
  return score;
}

EvalReport score_corpus(const std::vector<std::string>& refs,
                        const std::vector<std::string>& preds) {
  if (refs.size() != preds.size()) throw LengthMismatch(refs.size(), preds.size());
  EvalReport report;
  if (refs.empty()) return report;
  double af = 0;
  double at = 0;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    report.pairs.push_back(score_pair(refs[i], preds[i]));
    af += report.pairs.back().formula_accuracy;
    at += report.pairs.back().template_accuracy;
    report.buckets += report.pairs.back().buckets;
  }
  const auto n = static_cast<double>(refs.size());
  report.formula_accuracy = af / n;
  report.template_accuracy = at / n;
  report.bleu = bleu(refs, preds);
  return report;
}

}  // namespace stlkit::metrics
