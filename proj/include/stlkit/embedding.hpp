#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stlkit/error.hpp"

namespace stlkit::retrieval {

using Vector = std::vector<double>;

/// The provider has not been fitted on any document.
class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("embedding provider has not been fitted on a corpus") {}
};

/// A remote embedding service failed.
class ProviderError : public Error {
 public:
  using Error::Error;
};

/// Maps text to fixed-size vectors. Providers that need corpus statistics
/// learn them in fit(); embed() must be safe to call concurrently after fit.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual void fit(const std::vector<std::string>& documents) = 0;
  virtual Vector embed(const std::string& text) const = 0;
  virtual std::size_t dim() const = 0;
  /// Changes whenever embed() could return different vectors.
  virtual std::string fingerprint() const = 0;
};

/// Lowercased word tokens: runs of letters, digits and '_' (a '.' between
/// digits stays inside a number), and runs of operator symbols.
std::vector<std::string> embedding_tokens(const std::string& text);

/// Unigrams followed by space-joined bigrams.
std::vector<std::string> embedding_features(const std::string& text);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& s);

/// Word unigram+bigram TF-IDF with feature hashing. A feature f lands in
/// bucket fnv1a(f) % dim with weight count(f) * idf(bucket), where
/// idf(b) = ln((1 + N) / (1 + df(b))) + 1 over the N fitted documents.
/// The result is L2-normalized; text without features maps to zeros.
class HashedTfIdf : public EmbeddingProvider {
 public:
  explicit HashedTfIdf(std::size_t dim = 1024);

  void fit(const std::vector<std::string>& documents) override;
  Vector embed(const std::string& text) const override;
  std::size_t dim() const override { return dim_; }
  std::string fingerprint() const override;

  std::size_t documents() const { return documents_; }
  double idf(std::size_t bucket) const;

 private:
  std::size_t dim_;
  std::size_t documents_ = 0;
  std::vector<std::uint32_t> df_;
  std::uint64_t corpus_hash_ = 0;
};

double dot(const Vector& a, const Vector& b);
/// 0 when either vector is zero.
double cosine(const Vector& a, const Vector& b);
double squared_distance(const Vector& a, const Vector& b);

}  // namespace stlkit::retrieval
