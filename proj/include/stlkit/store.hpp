#pragma once

#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include "stlkit/embedding.hpp"
#include "stlkit/pair.hpp"

namespace stlkit::retrieval {

class EmptyStore : public Error {
 public:
  EmptyStore() : Error("knowledge store is empty") {}
};

/// Which text of a pair a vector is built from.
enum class EmbedField {
  PairText,  // nl + "\n" + stl
  NlOnly
};

struct ScoredPair {
  NLSTLPair pair;
  double score = 0;
};

/// Pairs with their embeddings. Every mutation refits the provider on the
/// pair texts and re-embeds, so vectors always reflect the current corpus.
/// Reads may run concurrently; mutation takes an exclusive lock.
class KnowledgeStore {
 public:
  explicit KnowledgeStore(std::shared_ptr<EmbeddingProvider> provider = nullptr);
  KnowledgeStore(std::vector<NLSTLPair> pairs, std::shared_ptr<EmbeddingProvider> provider = nullptr);

  KnowledgeStore(const KnowledgeStore& other);
  KnowledgeStore& operator=(const KnowledgeStore&) = delete;

  void add(NLSTLPair pair);
  void add(const std::vector<NLSTLPair>& pairs);

  std::size_t size() const;
  bool empty() const { return size() == 0; }
  std::vector<NLSTLPair> pairs() const;
  const EmbeddingProvider& provider() const { return *provider_; }
  std::string fingerprint() const;

  /// Vector of pair i for the given field.
  Vector vector(std::size_t i, EmbedField field = EmbedField::PairText) const;
  std::vector<Vector> vectors(EmbedField field = EmbedField::PairText) const;

  Vector embed(const std::string& text) const;
  Vector embed_pair(const NLSTLPair& pair) const;

  /// Up to k pairs by descending cosine to the query, ties by ascending id.
  /// Throws EmptyStore.
  std::vector<ScoredPair> top_k(const std::string& query, std::size_t k,
                                EmbedField field = EmbedField::NlOnly) const;

  /// Pairs as JSON Lines at path, vectors in path + ".vec".
  void save(const std::string& path) const;

  /// Loads pairs; vectors come from the sidecar when its fingerprint matches
  /// the refitted provider, otherwise they are recomputed.
  static KnowledgeStore load(const std::string& path,
                             std::shared_ptr<EmbeddingProvider> provider = nullptr);

  /// True when the last load() had to re-embed.
  bool reembedded() const { return reembedded_; }

 private:
  void rebuild();

  std::shared_ptr<EmbeddingProvider> provider_;
  std::vector<NLSTLPair> pairs_;
  std::vector<Vector> pair_vectors_;
  std::vector<Vector> nl_vectors_;
  bool reembedded_ = false;
  mutable std::shared_mutex mutex_;
};

std::string pair_text(const NLSTLPair& p);

class TooFewPoints : public Error {
 public:
  TooFewPoints(std::size_t points, std::size_t k);
};

struct Clustering {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;       // point index -> cluster
  std::vector<std::size_t> exemplar_indices;  // cluster -> point index
  std::vector<std::string> exemplar_ids;      // cluster -> point id
  std::vector<Vector> centroids;
  std::vector<double> sse_history;  // after each update step
  std::size_t iterations = 0;
};

/// k-means++ seeding from a 64-bit Mersenne Twister, then Lloyd iterations
/// until the assignment is stable or max_iterations is reached. An empty
/// cluster takes the point farthest from its centroid among clusters with
/// more than one member. Each exemplar is the member nearest its centroid,
/// ties by smaller id. Throws TooFewPoints when points < k or k == 0.
Clustering kmeans(const std::vector<Vector>& points, const std::vector<std::string>& ids,
                  std::size_t k, std::uint64_t seed, std::size_t max_iterations = 100);

Clustering kmeans(const KnowledgeStore& store, std::size_t k, std::uint64_t seed,
                  EmbedField field = EmbedField::PairText);

}  // namespace stlkit::retrieval
