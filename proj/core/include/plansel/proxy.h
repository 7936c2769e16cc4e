// Proxy scorer: BPE tokens stand in for the pool at query time.
//
// Offline, every token b_x is scored against every candidate with the plan
// similarity and embedded once. A test task t is then scored against
// candidate c as
//
//   score(c) = sum_x cos(embed(t), embed(b_x)) * sim(b_x, c)
//
// so query time needs one embedding and a (tokens x pool) weighted sum, with
// no per-candidate LCAS.

#ifndef PLANSEL_PROXY_H_
#define PLANSEL_PROXY_H_

#include <string>
#include <string_view>
#include <vector>

#include "plansel/bpe.h"
#include "plansel/embedder.h"
#include "plansel/pool.h"

namespace plansel {

class ProxyIndex {
 public:
  std::vector<std::vector<std::string>> tokens;
  std::vector<std::string> candidate_ids;
  // tokens x candidates, row-major.
  std::vector<double> token_candidate_sim;
  // tokens x dimension, row-major, each row L2-normalized (or zero).
  std::vector<double> token_embeddings;
  size_t dimension = 0;
  std::string embedder_fingerprint;

  size_t token_count() const { return tokens.size(); }
  size_t pool_size() const { return candidate_ids.size(); }
  double Sim(size_t token, size_t candidate) const {
    return token_candidate_sim[token * pool_size() + candidate];
  }
  std::span<const double> Embedding(size_t token) const {
    return {token_embeddings.data() + token * dimension, dimension};
  }

  bool operator==(const ProxyIndex&) const = default;
};

// Requires AS representations on every candidate (ReprMismatchError
// otherwise). Embedder failures surface as EmbedderError naming the token.
ProxyIndex BuildProxyIndex(const BpeVocab& vocab, const ExemplarPool& pool,
                           const Embedder& embedder, size_t workers = 0);

struct ProxyScoreOptions {
  // Negative cosines contribute 0 instead of a negative weight.
  bool clamp_negative = false;
};

// One embedder call per query. Throws EmbedderError when the embedder's
// dimension or fingerprint differs from the index.
std::vector<double> ProxyScore(std::string_view task_text,
                               const ProxyIndex& index,
                               const Embedder& embedder,
                               ProxyScoreOptions options = {});

// Scores from a precomputed query embedding.
std::vector<double> ProxyScoreEmbedded(std::span<const double> query,
                                       const ProxyIndex& index,
                                       ProxyScoreOptions options = {});

// Binary persistence: magic, format version, embedder fingerprint, then the
// matrices as native little-endian doubles.
void SaveProxyIndex(const ProxyIndex& index, const std::string& path);
ProxyIndex LoadProxyIndex(const std::string& path);

}  // namespace plansel

#endif  // PLANSEL_PROXY_H_
