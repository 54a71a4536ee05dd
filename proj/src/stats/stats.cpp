#include "stlkit/stats.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

#include "stlkit/analysis.hpp"
#include "stlkit/metrics.hpp"
#include "stlkit/parser.hpp"
#include "stlkit/token.hpp"

namespace stlkit::stats {

using nlohmann::json;

Summary summarize(std::vector<double> values) {
  if (values.empty()) return {};
  std::sort(values.begin(), values.end());
  const double sum = std::accumulate(values.begin(), values.end(), 0.0);
  const std::size_t n = values.size();
  const double median = n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
  return {sum / static_cast<double>(n), median};
}

double ngram_diversity(const std::vector<std::vector<std::string>>& sequences, std::size_t n_max) {
  if (n_max < 1) throw Error("n-gram order must be at least 1");
  double total = 0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    std::map<std::vector<std::string>, std::size_t> counts;
    std::size_t grams = 0;
    for (const auto& seq : sequences) {
      for (std::size_t i = 0; i + n <= seq.size(); ++i) {
        ++counts[std::vector<std::string>(seq.begin() + i, seq.begin() + i + n)];
        ++grams;
      }
    }
    double entropy = 0;
    for (const auto& [gram, c] : counts) {
      const double p = static_cast<double>(c) / static_cast<double>(grams);
      entropy -= p * std::log2(p);
    }
    total += entropy / static_cast<double>(n);
  }
  return total / static_cast<double>(n_max);
}

CorpusStats compute_stats(const std::vector<NLSTLPair>& pairs, std::size_t n_max) {
  CorpusStats s;
  s.pairs = pairs.size();
  s.ngram_order = n_max;

  std::vector<double> subformulas, operators, words_per, ident_chars, const_digits;
  std::vector<std::vector<std::string>> stl_seqs, nl_seqs;
  std::set<std::string> sentences, vocabulary;
  std::size_t identifier_total = 0;

  for (const auto& p : pairs) {
    std::vector<stl::Token> tokens;
    try {
      const auto f = stl::parse(p.stl);
      tokens = stl::tokenize(p.stl);
      subformulas.push_back(static_cast<double>(stl::subformulas(f).size()));
      operators.push_back(static_cast<double>(stl::count_operators(f)));
    } catch (const Error& e) {
      throw ParseFailure(p.id, e.what());
    }
    std::vector<std::string> lexemes;
    for (const auto& t : tokens) {
      lexemes.push_back(t.lexeme);
      if (t.kind == stl::TokenKind::Ident) {
        ident_chars.push_back(static_cast<double>(t.lexeme.size()));
        ++identifier_total;
      } else if (t.kind == stl::TokenKind::Number) {
        const auto digits = std::count_if(t.lexeme.begin(), t.lexeme.end(),
                                          [](unsigned char c) { return std::isdigit(c); });
        const_digits.push_back(static_cast<double>(digits));
      }
    }
    stl_seqs.push_back(std::move(lexemes));

    auto w = metrics::words(p.nl);
    words_per.push_back(static_cast<double>(w.size()));
    vocabulary.insert(w.begin(), w.end());
    sentences.insert(p.nl);
    nl_seqs.push_back(std::move(w));
  }

  s.formula.subformulas_per_formula = summarize(subformulas);
  s.formula.operators_per_formula = summarize(operators);
  s.formula.ngram_diversity = ngram_diversity(stl_seqs, n_max);
  s.text.unique_sentences = sentences.size();
  s.text.unique_words = vocabulary.size();
  s.text.words_per_sentence = summarize(words_per);
  s.text.ngram_diversity = ngram_diversity(nl_seqs, n_max);
  s.identifiers.chars_per_identifier = summarize(ident_chars);
  s.identifiers.digits_per_constant = summarize(const_digits);
  s.identifiers.identifiers_per_formula =
      pairs.empty() ? 0.0 : static_cast<double>(identifier_total) / static_cast<double>(pairs.size());
  return s;
}

namespace {

json summary_json(const Summary& s) { return {{"average", s.average}, {"median", s.median}}; }

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string row(const std::vector<std::string>& cells, const std::vector<std::size_t>& widths) {
  std::string out = "|";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out += " " + cells[i] + std::string(widths[i] - std::min(widths[i], cells[i].size()), ' ') + " |";
  }
  return out + "\n";
}

std::string table(const std::string& title, const std::vector<std::string>& header,
                  const std::vector<std::string>& values) {
  std::vector<std::size_t> widths;
  for (std::size_t i = 0; i < header.size(); ++i) {
    widths.push_back(std::max(header[i].size(), values[i].size()));
  }
  std::string rule = "|";
  for (auto w : widths) rule += std::string(w + 2, '-') + "|";
  return title + "\n" + row(header, widths) + rule + "\n" + row(values, widths);
}

}  // namespace

json to_json(const CorpusStats& s) {
  return json{
      {"pairs", s.pairs},
      {"formula",
       {{"subformulas_per_formula", summary_json(s.formula.subformulas_per_formula)},
        {"operators_per_formula", summary_json(s.formula.operators_per_formula)},
        {"ngram_diversity", s.formula.ngram_diversity}}},
      {"text",
       {{"unique_sentences", s.text.unique_sentences},
        {"unique_words", s.text.unique_words},
        {"words_per_sentence", summary_json(s.text.words_per_sentence)},
        {"ngram_diversity", s.text.ngram_diversity}}},
      {"identifiers",
       {{"chars_per_identifier", summary_json(s.identifiers.chars_per_identifier)},
        {"digits_per_constant", summary_json(s.identifiers.digits_per_constant)},
        {"identifiers_per_formula", s.identifiers.identifiers_per_formula}}},
      {"metadata",
       {{"ngram_order", s.ngram_order},
        {"definitions",
         {{"subformulas_per_formula",
           {{"status", "toolkit-defined"},
            {"rule", "every formula node counts, atoms included"}}},
          {"ngram_diversity",
           {{"status", "toolkit-defined"},
            {"rule", "mean over n = 1..ngram_order of the n-gram entropy in bits divided by n"}}}}}}}};
}

std::string render_table(const CorpusStats& s, const std::string& name) {
  const auto avg_med = [](const Summary& x) { return fixed(x.average) + " / " + fixed(x.median); };
  std::string out;
  out += table("(a) formulas",
               {"dataset", "subformulas avg/med", "operators avg/med", "n-gram diversity"},
               {name, avg_med(s.formula.subformulas_per_formula),
                avg_med(s.formula.operators_per_formula), fixed(s.formula.ngram_diversity)});
  out += "\n";
  out += table("(b) text",
               {"dataset", "unique sentences", "unique words", "words/sentence avg/med",
                "n-gram diversity"},
               {name, std::to_string(s.text.unique_sentences), std::to_string(s.text.unique_words),
                avg_med(s.text.words_per_sentence), fixed(s.text.ngram_diversity)});
  out += "\n";
  out += table("(c) identifiers and constants",
               {"dataset", "chars/identifier avg/med", "digits/constant avg/med",
                "identifiers/formula avg"},
               {name, avg_med(s.identifiers.chars_per_identifier),
                avg_med(s.identifiers.digits_per_constant),
                fixed(s.identifiers.identifiers_per_formula)});
  return out;
}

}  // namespace stlkit::stats
