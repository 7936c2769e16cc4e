#include "plansel/embedder.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "plansel/sexpr.h"

namespace plansel {

namespace {

uint64_t Fnv1a(std::string_view text, uint64_t seed) {
  uint64_t h = 0xcbf29ce484222325ULL ^ (seed * 0x9e3779b97f4a7c15ULL);
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  // splitmix64 finalizer spreads the low bits used for the bucket index.
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return h;
}

}  // namespace

HashedEmbedder::HashedEmbedder(size_t dimension, uint64_t seed)
    : dimension_(dimension), seed_(seed) {
  if (dimension < 8) {
    throw std::invalid_argument("hashed embedder dimension must be >= 8");
  }
}

std::vector<double> HashedEmbedder::Embed(std::string_view text) const {
  std::vector<double> v(dimension_, 0.0);
  std::istringstream in{std::string(text)};
  std::string word;
  auto alnum = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
  };
  while (in >> word) {
    auto first = std::find_if(word.begin(), word.end(), alnum);
    auto last = std::find_if(word.rbegin(), word.rend(), alnum).base();
    if (first >= last) continue;
    const std::string token = ToLower(std::string_view(&*first, last - first));
    const uint64_t h = Fnv1a(token, seed_);
    const double sign = (h >> 63) != 0 ? -1.0 : 1.0;
    v[h % dimension_] += sign;
  }
  NormalizeInPlace(&v);
  return v;
}

std::string HashedEmbedder::Fingerprint() const {
  return "hashed-unigram/v1/dim=" + std::to_string(dimension_) +
         "/seed=" + std::to_string(seed_);
}

double Cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw EmbedderError("cosine of vectors with different dimensions");
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

void NormalizeInPlace(std::vector<double>* v) {
  double norm = 0.0;
  for (double x : *v) norm += x * x;
  if (norm == 0.0) return;
  norm = std::sqrt(norm);
  for (double& x : *v) x /= norm;
}

}  // namespace plansel
