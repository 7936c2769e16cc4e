#ifndef PLANSEL_EMBEDDER_H_
#define PLANSEL_EMBEDDER_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace plansel {

class EmbedderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Text -> fixed-dimension vector. Implementations must be deterministic for a
// fixed configuration and safe to call from several threads.
class Embedder {
 public:
  virtual ~Embedder() = default;

  virtual size_t dimension() const = 0;
  virtual std::vector<double> Embed(std::string_view text) const = 0;
  // Identifies the configuration; persisted next to precomputed embeddings.
  virtual std::string Fingerprint() const = 0;
};

// Signed feature hashing over whitespace unigrams (same normalization as task
// tokens), L2-normalized. The empty text embeds to the zero vector.
class HashedEmbedder : public Embedder {
 public:
  // Throws std::invalid_argument when dimension < 8.
  HashedEmbedder(size_t dimension, uint64_t seed);

  size_t dimension() const override { return dimension_; }
  std::vector<double> Embed(std::string_view text) const override;
  std::string Fingerprint() const override;

 private:
  size_t dimension_;
  uint64_t seed_;
};

// Cosine similarity; 0 when either vector has zero norm.
double Cosine(std::span<const double> a, std::span<const double> b);

void NormalizeInPlace(std::vector<double>* v);

}  // namespace plansel

#endif  // PLANSEL_EMBEDDER_H_
