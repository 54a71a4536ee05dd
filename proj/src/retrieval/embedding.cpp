#include "stlkit/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cmath>
#include <map>
#include <set>

namespace stlkit::retrieval {

namespace {

bool word_char(unsigned char c) { return std::isalnum(c) || c == '_'; }

bool symbol_char(char c) {
  switch (c) {
    case '<': case '>': case '=': case '!': case '&': case '|':
    case '-': case '+': case '*': case '/':
      return true;
    default:
      return false;
  }
}

}  // namespace

std::vector<std::string> embedding_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (word_char(c)) {
      std::string tok;
      while (i < text.size()) {
        const auto d = static_cast<unsigned char>(text[i]);
        const bool decimal_point = d == '.' && !tok.empty() &&
                                   std::isdigit(static_cast<unsigned char>(tok.back())) &&
                                   i + 1 < text.size() &&
                                   std::isdigit(static_cast<unsigned char>(text[i + 1]));
        if (!word_char(d) && !decimal_point) break;
        tok += static_cast<char>(std::tolower(d));
        ++i;
      }
      out.push_back(std::move(tok));
    } else if (symbol_char(text[i])) {
      std::string tok;
      while (i < text.size() && symbol_char(text[i])) tok += text[i++];
      out.push_back(std::move(tok));
    } else {
      ++i;
    }
  }
  return out;
}

std::vector<std::string> embedding_features(const std::string& text) {
  const auto toks = embedding_tokens(text);
  std::vector<std::string> feats(toks.begin(), toks.end());
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) feats.push_back(toks[i] + " " + toks[i + 1]);
  return feats;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

HashedTfIdf::HashedTfIdf(std::size_t dim) : dim_(dim), df_(dim, 0) {
  if (dim == 0) throw Error("embedding dimension must be positive");
}

void HashedTfIdf::fit(const std::vector<std::string>& documents) {
  std::fill(df_.begin(), df_.end(), 0);
  documents_ = documents.size();
  std::uint64_t h = 14695981039346656037ull;
  for (const auto& doc : documents) {
    std::set<std::size_t> buckets;
    for (const auto& f : embedding_features(doc)) buckets.insert(fnv1a(f) % dim_);
    for (auto b : buckets) ++df_[b];
    h = (h ^ fnv1a(doc)) * 1099511628211ull;
  }
  corpus_hash_ = h;
}

double HashedTfIdf::idf(std::size_t bucket) const {
  return std::log((1.0 + static_cast<double>(documents_)) / (1.0 + df_.at(bucket))) + 1.0;
}

Vector HashedTfIdf::embed(const std::string& text) const {
  if (documents_ == 0) throw EmptyCorpus();
  std::map<std::size_t, double> counts;
  for (const auto& f : embedding_features(text)) counts[fnv1a(f) % dim_] += 1.0;
  Vector v(dim_, 0.0);
  for (const auto& [bucket, count] : counts) v[bucket] = count * idf(bucket);
  const double norm = std::sqrt(dot(v, v));
  if (norm > 0) {
    for (auto& x : v) x /= norm;
  }
  return v;
}

std::string HashedTfIdf::fingerprint() const {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(corpus_hash_));
  return "hashed-tfidf/v1/dim=" + std::to_string(dim_) + "/docs=" + std::to_string(documents_) +
         "/corpus=" + hex;
}

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw Error("vector dimensions differ");
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double cosine(const Vector& a, const Vector& b) {
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na == 0 || nb == 0) return 0.0;
  return dot(a, b) / (na * nb);
}

double squared_distance(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw Error("vector dimensions differ");
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace stlkit::retrieval
