#include "stlkit/store.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>

#include "stlkit/io.hpp"

namespace stlkit::retrieval {

namespace {

constexpr char kMagic[8] = {'S', 'T', 'L', 'K', 'V', 'E', 'C', '1'};

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw IoError("truncated vector file");
  T value;
  std::memcpy(&value, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

}  // namespace

std::string pair_text(const NLSTLPair& p) { return p.nl + "\n" + p.stl; }

KnowledgeStore::KnowledgeStore(std::shared_ptr<EmbeddingProvider> provider)
    : provider_(provider ? std::move(provider) : std::make_shared<HashedTfIdf>()) {}

KnowledgeStore::KnowledgeStore(std::vector<NLSTLPair> pairs,
                               std::shared_ptr<EmbeddingProvider> provider)
    : KnowledgeStore(std::move(provider)) {
  pairs_ = std::move(pairs);
  rebuild();
}

KnowledgeStore::KnowledgeStore(const KnowledgeStore& other) {
  std::shared_lock lock(other.mutex_);
  provider_ = other.provider_;
  pairs_ = other.pairs_;
  pair_vectors_ = other.pair_vectors_;
  nl_vectors_ = other.nl_vectors_;
  reembedded_ = other.reembedded_;
}

void KnowledgeStore::rebuild() {
  pair_vectors_.clear();
  nl_vectors_.clear();
  if (pairs_.empty()) return;
  std::vector<std::string> docs;
  docs.reserve(pairs_.size());
  for (const auto& p : pairs_) docs.push_back(pair_text(p));
  provider_->fit(docs);
  for (const auto& p : pairs_) {
    pair_vectors_.push_back(provider_->embed(pair_text(p)));
    nl_vectors_.push_back(provider_->embed(p.nl));
  }
}

void KnowledgeStore::add(NLSTLPair pair) { add(std::vector<NLSTLPair>{std::move(pair)}); }

void KnowledgeStore::add(const std::vector<NLSTLPair>& pairs) {
  std::unique_lock lock(mutex_);
  for (const auto& p : pairs) {
    const bool dup = std::any_of(pairs_.begin(), pairs_.end(),
                                 [&](const NLSTLPair& q) { return q.id == p.id; });
    if (dup) throw Error("duplicate pair id '" + p.id + "'");
  }
  pairs_.insert(pairs_.end(), pairs.begin(), pairs.end());
  rebuild();
}

std::size_t KnowledgeStore::size() const {
  std::shared_lock lock(mutex_);
  return pairs_.size();
}

std::vector<NLSTLPair> KnowledgeStore::pairs() const {
  std::shared_lock lock(mutex_);
  return pairs_;
}

std::string KnowledgeStore::fingerprint() const {
  std::shared_lock lock(mutex_);
  return provider_->fingerprint();
}

Vector KnowledgeStore::vector(std::size_t i, EmbedField field) const {
  std::shared_lock lock(mutex_);
  return (field == EmbedField::PairText ? pair_vectors_ : nl_vectors_).at(i);
}

std::vector<Vector> KnowledgeStore::vectors(EmbedField field) const {
  std::shared_lock lock(mutex_);
  return field == EmbedField::PairText ? pair_vectors_ : nl_vectors_;
}

Vector KnowledgeStore::embed(const std::string& text) const {
  std::shared_lock lock(mutex_);
  return provider_->embed(text);
}

Vector KnowledgeStore::embed_pair(const NLSTLPair& pair) const { return embed(pair_text(pair)); }

std::vector<ScoredPair> KnowledgeStore::top_k(const std::string& query, std::size_t k,
                                              EmbedField field) const {
  std::shared_lock lock(mutex_);
  if (pairs_.empty()) throw EmptyStore();
  const Vector q = provider_->embed(query);
  const auto& vecs = field == EmbedField::PairText ? pair_vectors_ : nl_vectors_;
  std::vector<std::size_t> order(pairs_.size());
  std::vector<double> scores(pairs_.size());
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    order[i] = i;
    scores[i] = cosine(q, vecs[i]);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return pairs_[a].id < pairs_[b].id;
  });
  order.resize(std::min(k, order.size()));
  std::vector<ScoredPair> out;
  for (auto i : order) out.push_back({pairs_[i], scores[i]});
  return out;
}

void KnowledgeStore::save(const std::string& path) const {
  std::shared_lock lock(mutex_);
  save_pairs(path, pairs_);
  std::string bin(kMagic, sizeof kMagic);
  const std::string fp = provider_->fingerprint();
  put<std::uint32_t>(bin, static_cast<std::uint32_t>(fp.size()));
  bin += fp;
  put<std::uint64_t>(bin, provider_->dim());
  put<std::uint64_t>(bin, pairs_.size());
  for (const auto* set : {&pair_vectors_, &nl_vectors_}) {
    for (const auto& v : *set) {
      for (double x : v) put<double>(bin, x);
    }
  }
  write_file_atomic(path + ".vec", bin);
}

KnowledgeStore KnowledgeStore::load(const std::string& path,
                                    std::shared_ptr<EmbeddingProvider> provider) {
  KnowledgeStore store(std::move(provider));
  store.pairs_ = load_pairs(path);
  if (store.pairs_.empty()) return store;

  std::vector<std::string> docs;
  for (const auto& p : store.pairs_) docs.push_back(pair_text(p));
  store.provider_->fit(docs);

  const std::string vec_path = path + ".vec";
  bool loaded = false;
  if (std::filesystem::exists(vec_path)) {
    const std::string bin = read_file(vec_path);
    std::size_t pos = sizeof kMagic;
    if (bin.size() >= pos && std::memcmp(bin.data(), kMagic, sizeof kMagic) == 0) {
      const auto fp_len = take<std::uint32_t>(bin, pos);
      if (pos + fp_len <= bin.size()) {
        const std::string fp = bin.substr(pos, fp_len);
        pos += fp_len;
        const auto dim = take<std::uint64_t>(bin, pos);
        const auto count = take<std::uint64_t>(bin, pos);
        const std::size_t need = 2 * count * dim * sizeof(double);
        if (fp == store.provider_->fingerprint() && dim == store.provider_->dim() &&
            count == store.pairs_.size() && pos + need == bin.size()) {
          for (auto* set : {&store.pair_vectors_, &store.nl_vectors_}) {
            for (std::size_t i = 0; i < count; ++i) {
              Vector v(dim);
              for (auto& x : v) x = take<double>(bin, pos);
              set->push_back(std::move(v));
            }
          }
          loaded = true;
        }
      }
    }
  }
  if (!loaded) {
    store.rebuild();
    store.reembedded_ = true;
  }
  return store;
}

}  // namespace stlkit::retrieval
