#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "stlkit/printer.hpp"
#include "stlkit/stats.hpp"
#include "support/generators.hpp"

using namespace stlkit;
using namespace stlkit::stats;

namespace {

NLSTLPair pair(std::string id, std::string nl, std::string stl) {
  NLSTLPair p;
  p.id = std::move(id);
  p.nl = std::move(nl);
  p.stl = std::move(stl);
  return p;
}

const char* kAt = "G[0,27] ( ( speed > 50 ) -> F[1,3] ( rpm < 3000 ) )";

}  // namespace

TEST_SUITE("corpus statistics") {
  TEST_CASE("a single atom") {
    const auto s = compute_stats({pair("p", "x is positive", "x > 0")});
    CHECK(s.formula.subformulas_per_formula.average == 1.0);
    CHECK(s.formula.operators_per_formula.average == 0.0);
    CHECK(s.identifiers.identifiers_per_formula == 1.0);
    CHECK(s.identifiers.chars_per_identifier.median == 1.0);
  }

  TEST_CASE("the speed and rpm requirement") {
    const auto s = compute_stats({pair("at", "speed above 50 means rpm drops soon", kAt)});
    CHECK(s.formula.operators_per_formula.average == 3.0);
    CHECK(s.formula.subformulas_per_formula.average == 5.0);
    CHECK(s.identifiers.identifiers_per_formula == 2.0);
    // Constants 0, 27, 50, 1, 3, 3000 have 1, 2, 2, 1, 1, 4 digits.
    CHECK(s.identifiers.digits_per_constant.average == doctest::Approx(11.0 / 6.0));
    CHECK(s.identifiers.digits_per_constant.median == 1.5);
    // speed and rpm: 5 and 3 characters.
    CHECK(s.identifiers.chars_per_identifier.average == 4.0);
  }

  TEST_CASE("duplicates count once in the unique counts") {
    const auto one = compute_stats({pair("a", "The valve opens.", "F[0,1](v > 0)"),
                                    pair("b", "Pressure stays low.", "G[0,1](p < 1)")});
    const auto dup = compute_stats({pair("a", "The valve opens.", "F[0,1](v > 0)"),
                                    pair("b", "Pressure stays low.", "G[0,1](p < 1)"),
                                    pair("c", "The valve opens.", "F[0,1](v > 0)")});
    CHECK(one.text.unique_sentences == 2);
    CHECK(dup.text.unique_sentences == 2);
    CHECK(dup.text.unique_words == one.text.unique_words);
    CHECK(one.text.unique_words == 6);
    CHECK(one.text.words_per_sentence.average == 3.0);
  }

  TEST_CASE("case and punctuation do not make new words") {
    const auto s = compute_stats({pair("a", "Valve, valve VALVE.", "v > 0")});
    CHECK(s.text.unique_words == 1);
    CHECK(s.text.words_per_sentence.average == 3.0);
  }

  TEST_CASE("unparseable pairs are named") {
    try {
      (void)compute_stats({pair("good", "x", "x > 0"), pair("bad", "y", "G[0,1](y >")});
      FAIL("expected ParseFailure");
    } catch (const ParseFailure& e) {
      CHECK(e.id() == "bad");
    }
  }

  TEST_CASE("report metadata marks the measures this toolkit defines") {
    const auto j = to_json(compute_stats({pair("a", "x", "x > 0")}));
    CHECK(j["metadata"]["definitions"]["ngram_diversity"]["status"] == "toolkit-defined");
    CHECK(j["metadata"]["definitions"]["subformulas_per_formula"]["status"] == "toolkit-defined");
    const auto table = render_table(compute_stats({pair("a", "x", "x > 0")}), "toy");
    CHECK(table.find("(a) formulas") != std::string::npos);
    CHECK(table.find("| toy ") != std::string::npos);
  }

  TEST_CASE("summaries") {
    CHECK(summarize({}).average == 0.0);
    CHECK(summarize({3, 1, 2}).median == 2.0);
    CHECK(summarize({4, 1, 3, 2}).median == 2.5);
    CHECK(summarize({4, 1, 3, 2}).average == 2.5);
  }

  TEST_CASE("random corpora: medians, averages and tree arithmetic") {
    std::mt19937_64 rng(11);
    testing::FormulaGen gen{rng};
    for (int round = 0; round < 30; ++round) {
      std::vector<NLSTLPair> pairs;
      std::vector<double> ops, subs;
      const int n = gen.pick(1, 12);
      for (int i = 0; i < n; ++i) {
        auto p = pair("p" + std::to_string(i), "sentence number " + std::to_string(gen.pick(0, 5)),
                      stl::format(gen.formula(gen.pick(0, 4))));
        pairs.push_back(p);
        const auto single = compute_stats({p});
        CHECK(single.formula.operators_per_formula.average <=
              single.formula.subformulas_per_formula.average - 1);
        ops.push_back(single.formula.operators_per_formula.average);
        subs.push_back(single.formula.subformulas_per_formula.average);
      }
      const auto s = compute_stats(pairs);
      const auto [lo, hi] = std::minmax_element(subs.begin(), subs.end());
      CHECK(s.formula.subformulas_per_formula.average >= *lo);
      CHECK(s.formula.subformulas_per_formula.average <= *hi);
      const double med = s.formula.operators_per_formula.median;
      std::sort(ops.begin(), ops.end());
      const bool member = std::find(ops.begin(), ops.end(), med) != ops.end();
      const bool midpoint = ops.size() % 2 == 0 &&
                            med == (ops[ops.size() / 2 - 1] + ops[ops.size() / 2]) / 2;
      CHECK((member || midpoint));
    }
  }
}

TEST_SUITE("n-gram diversity") {
  TEST_CASE("one repeated token") {
    CHECK(ngram_diversity({{"a", "a", "a", "a"}}, 1) == 0.0);
    CHECK(ngram_diversity({{"a", "a", "a", "a"}}, 3) == 0.0);
  }

  TEST_CASE("two equiprobable unigrams") {
    CHECK(ngram_diversity({{"a", "b"}}, 1) == doctest::Approx(1.0));
  }

  TEST_CASE("a a b c") {
    // Unigrams 2:1:1 -> 1.5 bits; bigrams aa, ab, bc -> log2 3 bits over n = 2.
    CHECK(ngram_diversity({{"a", "a", "b", "c"}}, 1) == doctest::Approx(1.5));
    CHECK(ngram_diversity({{"a", "a", "b", "c"}}, 2) ==
          doctest::Approx((1.5 + std::log2(3.0) / 2.0) / 2.0));
  }

  TEST_CASE("n-grams do not cross sequence boundaries") {
    CHECK(ngram_diversity({{"a"}, {"b"}}, 2) == doctest::Approx(0.5));
  }

  TEST_CASE("order must be positive") {
    CHECK_THROWS_AS((void)ngram_diversity({{"a"}}, 0), Error);
  }

  TEST_CASE("permutation invariant and non-negative") {
    std::mt19937_64 rng(5);
    for (int round = 0; round < 50; ++round) {
      std::vector<std::vector<std::string>> seqs(std::uniform_int_distribution<int>(1, 6)(rng));
      for (auto& s : seqs) {
        const int len = std::uniform_int_distribution<int>(0, 8)(rng);
        for (int i = 0; i < len; ++i) {
          s.push_back(std::string(1, static_cast<char>('a' + rng() % 4)));
        }
      }
      const double d = ngram_diversity(seqs, 3);
      CHECK(d >= 0.0);
      auto shuffled = seqs;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      CHECK(ngram_diversity(shuffled, 3) == doctest::Approx(d));
    }
  }
}
