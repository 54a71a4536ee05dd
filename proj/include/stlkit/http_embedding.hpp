#pragma once

#include "stlkit/embedding.hpp"
#include "stlkit/llm.hpp"

namespace stlkit::llm {

/// Embeddings from POST {endpoint}/embeddings ({model, input}) reading
/// data[0].embedding. Vectors are L2-normalized; fit() only records the
/// dimension reported by the service.
class HttpEmbeddingProvider : public retrieval::EmbeddingProvider {
 public:
  explicit HttpEmbeddingProvider(BackendConfig cfg);

  void fit(const std::vector<std::string>& documents) override;
  retrieval::Vector embed(const std::string& text) const override;
  std::size_t dim() const override { return dim_; }
  std::string fingerprint() const override;

 private:
  BackendConfig cfg_;
  std::size_t dim_ = 0;
};

}  // namespace stlkit::llm
