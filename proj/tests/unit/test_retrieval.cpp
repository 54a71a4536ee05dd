#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <set>

#include "stlkit/io.hpp"
#include "stlkit/store.hpp"

using namespace stlkit;
using namespace stlkit::retrieval;

namespace {

NLSTLPair make_pair(std::string id, std::string nl, std::string stl) {
  NLSTLPair p;
  p.id = std::move(id);
  p.nl = std::move(nl);
  p.stl = std::move(stl);
  return p;
}

std::set<std::size_t> buckets(const std::vector<std::string>& texts, std::size_t dim) {
  std::set<std::string> feats;
  for (const auto& t : texts) {
    for (const auto& f : embedding_features(t)) feats.insert(f);
  }
  std::set<std::size_t> out;
  for (const auto& f : feats) out.insert(fnv1a(f) % dim);
  REQUIRE(out.size() == feats.size());  // the hand computations assume no collisions
  return out;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("stlkit-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("embedding") {
  TEST_CASE("tokens and features") {
    CHECK(embedding_tokens("Speed >= 1.5, then G[0,5]!") ==
          std::vector<std::string>{"speed", ">=", "1.5", "then", "g", "0", "5", "!"});
    CHECK(embedding_features("a b c") ==
          std::vector<std::string>{"a", "b", "c", "a b", "b c"});
  }

  TEST_CASE("fnv1a reference values") {
    CHECK(fnv1a("") == 14695981039346656037ull);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
  }

  TEST_CASE("unfitted provider") {
    HashedTfIdf p;
    CHECK_THROWS_AS((void)p.embed("x"), EmptyCorpus);
  }

  TEST_CASE("deterministic, normalized, zero for empty text") {
    HashedTfIdf p;
    p.fit({"the robot stops", "the car moves"});
    const auto v = p.embed("the robot moves");
    CHECK(v == p.embed("the robot moves"));
    CHECK(std::sqrt(dot(v, v)) == doctest::Approx(1.0).epsilon(1e-12));
    const auto z = p.embed("");
    CHECK(std::all_of(z.begin(), z.end(), [](double x) { return x == 0.0; }));
    CHECK(cosine(v, v) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("word-disjoint sentences are orthogonal") {
    HashedTfIdf p;
    const std::vector<std::string> docs{"robot arm rotates", "vehicle brakes hard"};
    buckets(docs, p.dim());
    p.fit(docs);
    CHECK(std::fabs(cosine(p.embed(docs[0]), p.embed(docs[1]))) < 1e-9);
  }

  TEST_CASE("hand-computed vector") {
    // Corpus: "robot stops", "robot moves", "car stops" (N = 3).
    // df(robot) = df(stops) = 2, every other feature 1.
    HashedTfIdf p;
    const std::vector<std::string> docs{"robot stops", "robot moves", "car stops"};
    buckets(docs, p.dim());
    p.fit(docs);
    const double a = std::log(4.0 / 3.0) + 1;
    const double b = std::log(2.0) + 1;
    const double norm = std::sqrt(2 * a * a + b * b);
    const auto v = p.embed("robot stops");
    CHECK(v[fnv1a("robot") % 1024] == doctest::Approx(a / norm).epsilon(1e-12));
    CHECK(v[fnv1a("stops") % 1024] == doctest::Approx(a / norm).epsilon(1e-12));
    CHECK(v[fnv1a("robot stops") % 1024] == doctest::Approx(b / norm).epsilon(1e-12));
    std::size_t nonzero = 0;
    for (double x : v) nonzero += x != 0;
    CHECK(nonzero == 3);
  }

  TEST_CASE("fingerprint tracks the corpus") {
    HashedTfIdf p, q;
    p.fit({"a b"});
    q.fit({"a c"});
    CHECK(p.fingerprint() != q.fingerprint());
    HashedTfIdf r(64);
    r.fit({"a b"});
    CHECK(r.fingerprint() != p.fingerprint());
  }
}

TEST_SUITE("knowledge store") {
  const std::vector<NLSTLPair> toy{make_pair("p1", "robot stops", "x > 0"),
                                   make_pair("p2", "robot moves", "y > 0"),
                                   make_pair("p3", "car stops fast", "z > 0")};

  TEST_CASE("hand-computed ranking") {
    std::vector<std::string> texts;
    for (const auto& p : toy) texts.push_back(pair_text(p));
    texts.push_back("robot stops fast");
    buckets(texts, 1024);

    // Query features: robot, stops (df 2 -> a) and fast, "robot stops",
    // "stops fast" (df 1 -> b). NL vectors of the pairs follow the same way.
    const double a = std::log(4.0 / 3.0) + 1;
    const double b = std::log(2.0) + 1;
    const double q = std::sqrt(2 * a * a + 3 * b * b);
    const double cos1 = std::sqrt(2 * a * a + b * b) / q;
    const double cos2 = a * a / (q * std::sqrt(a * a + 2 * b * b));
    const double cos3 = (a * a + 2 * b * b) / (q * std::sqrt(a * a + 4 * b * b));

    const KnowledgeStore store(toy);
    const auto hits = store.top_k("robot stops fast", 3);
    REQUIRE(hits.size() == 3);
    CHECK(hits[0].pair.id == "p1");
    CHECK(hits[1].pair.id == "p3");
    CHECK(hits[2].pair.id == "p2");
    CHECK(hits[0].score == doctest::Approx(cos1).epsilon(1e-12));
    CHECK(hits[1].score == doctest::Approx(cos3).epsilon(1e-12));
    CHECK(hits[2].score == doctest::Approx(cos2).epsilon(1e-12));
  }

  TEST_CASE("self query ranks first, k is clamped, ties by id") {
    const KnowledgeStore store(toy);
    CHECK(store.top_k("robot moves", 1)[0].pair.id == "p2");
    CHECK(store.top_k("robot moves", 10).size() == 3);
    const auto none = store.top_k("unrelated words", 3);
    CHECK(none[0].pair.id == "p1");
    CHECK(none[2].pair.id == "p3");
    for (std::size_t i = 1; i < none.size(); ++i) CHECK(none[i - 1].score >= none[i].score);
  }

  TEST_CASE("empty store") {
    const KnowledgeStore store;
    CHECK_THROWS_AS((void)store.top_k("x", 1), EmptyStore);
  }

  TEST_CASE("pair embedding") {
    const KnowledgeStore store(toy);
    auto a = toy[0];
    auto b = toy[0];
    b.stl = "x < 0";
    CHECK(store.embed_pair(a) == store.embed_pair(a));
    CHECK(squared_distance(store.embed_pair(a), store.embed_pair(b)) > 0);
    CHECK(store.vector(0) == store.embed_pair(a));
  }

  TEST_CASE("adding refits and rejects duplicate ids") {
    KnowledgeStore store(toy);
    const auto before = store.fingerprint();
    store.add(make_pair("p4", "drone hovers", "h >= 2"));
    CHECK(store.size() == 4);
    CHECK(store.fingerprint() != before);
    CHECK(store.top_k("drone hovers", 1)[0].pair.id == "p4");
    CHECK_THROWS_AS(store.add(make_pair("p4", "again", "h > 1")), Error);
  }

  TEST_CASE("save and load") {
    const auto dir = temp_dir("store");
    const std::string path = (dir / "store.jsonl").string();
    const KnowledgeStore store(toy);
    store.save(path);
    const auto loaded = KnowledgeStore::load(path);
    CHECK_FALSE(loaded.reembedded());
    CHECK(loaded.pairs() == store.pairs());
    CHECK(loaded.vectors() == store.vectors());
    CHECK(loaded.vectors(EmbedField::NlOnly) == store.vectors(EmbedField::NlOnly));

    auto changed = toy;
    changed[1].nl = "robot moves slowly";
    save_pairs(path, changed);
    const auto stale = KnowledgeStore::load(path);
    CHECK(stale.reembedded());
    CHECK(stale.vectors() == KnowledgeStore(changed).vectors());
    std::filesystem::remove_all(dir);
  }
}

TEST_SUITE("kmeans") {
  std::vector<std::string> ids_for(std::size_t n) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("id" + std::to_string(i));
    return ids;
  }

  TEST_CASE("k equal to the number of points gives singletons") {
    const std::vector<Vector> pts{{0, 0}, {1, 0}, {0, 1}, {5, 5}, {9, 1}};
    const auto ids = ids_for(5);
    const auto c = kmeans(pts, ids, 5, 42);
    std::set<std::size_t> clusters(c.assignments.begin(), c.assignments.end());
    CHECK(clusters.size() == 5);
    CHECK(std::set<std::string>(c.exemplar_ids.begin(), c.exemplar_ids.end()) ==
          std::set<std::string>(ids.begin(), ids.end()));
  }

  TEST_CASE("duplicates with one cluster pick the smallest id") {
    const std::vector<Vector> pts(4, Vector{1, 2});
    const auto c = kmeans(pts, {"d", "b", "c", "e"}, 1, 7);
    CHECK(c.exemplar_ids == std::vector<std::string>{"b"});
  }

  TEST_CASE("duplicates with several clusters still give distinct exemplars") {
    std::vector<Vector> pts;
    for (int i = 0; i < 3; ++i) {
      pts.push_back({0, 0});
      pts.push_back({1, 1});
    }
    const auto c = kmeans(pts, ids_for(6), 4, 3);
    std::set<std::string> ex(c.exemplar_ids.begin(), c.exemplar_ids.end());
    CHECK(ex.size() == 4);
    std::set<std::size_t> clusters(c.assignments.begin(), c.assignments.end());
    CHECK(clusters.size() == 4);
  }

  TEST_CASE("too few points") {
    CHECK_THROWS_AS((void)kmeans({{0.0}}, {"a"}, 2, 1), TooFewPoints);
    CHECK_THROWS_AS((void)kmeans({{0.0}}, {"a"}, 0, 1), TooFewPoints);
  }

  TEST_CASE("separated groups match the exhaustive optimum") {
    const std::vector<Vector> pts{{0}, {1}, {2}, {10}, {11}, {12.5}};
    const auto ids = ids_for(6);
    // Exhaustive search over all two-way partitions.
    double best = INFINITY;
    unsigned best_mask = 0;
    for (unsigned mask = 1; mask < (1u << 6) - 1; ++mask) {
      double sse = 0;
      for (unsigned side = 0; side < 2; ++side) {
        double sum = 0;
        int n = 0;
        for (unsigned i = 0; i < 6; ++i) {
          if (((mask >> i) & 1u) == side) {
            sum += pts[i][0];
            ++n;
          }
        }
        const double mean = sum / n;
        for (unsigned i = 0; i < 6; ++i) {
          if (((mask >> i) & 1u) == side) sse += (pts[i][0] - mean) * (pts[i][0] - mean);
        }
      }
      if (sse < best) {
        best = sse;
        best_mask = mask;
      }
    }
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto c = kmeans(pts, ids, 2, seed);
      for (unsigned i = 0; i < 6; ++i) {
        for (unsigned j = 0; j < 6; ++j) {
          const bool same_opt = ((best_mask >> i) & 1u) == ((best_mask >> j) & 1u);
          CHECK((c.assignments[i] == c.assignments[j]) == same_opt);
        }
      }
      CHECK(c.sse_history.back() == doctest::Approx(best));
    }
  }

  TEST_CASE("random inputs: invariants and determinism") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> noise(0, 1);
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t n = 6 + rng() % 30;
      const std::size_t k = 1 + rng() % 6;
      std::vector<Vector> pts;
      for (std::size_t i = 0; i < n; ++i) pts.push_back({noise(rng), noise(rng), noise(rng)});
      const auto ids = ids_for(n);
      const auto c = kmeans(pts, ids, k, trial);
      for (std::size_t i = 1; i < c.sse_history.size(); ++i) {
        CHECK(c.sse_history[i] <= c.sse_history[i - 1] + 1e-12);
      }
      std::set<std::size_t> used(c.assignments.begin(), c.assignments.end());
      CHECK(used.size() == k);
      for (std::size_t cl = 0; cl < k; ++cl) CHECK(c.assignments[c.exemplar_indices[cl]] == cl);
      const auto again = kmeans(pts, ids, k, trial);
      CHECK(again.assignments == c.assignments);
      CHECK(again.exemplar_ids == c.exemplar_ids);
      CHECK(c.iterations <= 100);
    }
  }
}
