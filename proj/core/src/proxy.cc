#include "plansel/proxy.h"

#include <cstring>
#include <fstream>

#include "plansel/parallel.h"

namespace plansel {

namespace {

constexpr char kIndexMagic[8] = {'P', 'L', 'S', 'L', 'I', 'D', 'X', '\n'};
constexpr uint32_t kIndexVersion = 1;

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write index '" + path + "'");
  }
  void Bytes(const void* data, size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  }
  void U64(uint64_t v) { Bytes(&v, sizeof v); }
  void String(const std::string& s) {
    U64(s.size());
    Bytes(s.data(), s.size());
  }
  void Doubles(const std::vector<double>& v) {
    U64(v.size());
    Bytes(v.data(), v.size() * sizeof(double));
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path)
      : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw std::runtime_error("cannot read index '" + path + "'");
  }
  void Bytes(void* data, size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (!in_) throw std::runtime_error("truncated index file '" + path_ + "'");
  }
  uint64_t U64() {
    uint64_t v = 0;
    Bytes(&v, sizeof v);
    return v;
  }
  std::string String() {
    std::string s(U64(), '\0');
    Bytes(s.data(), s.size());
    return s;
  }
  std::vector<double> Doubles() {
    std::vector<double> v(U64());
    Bytes(v.data(), v.size() * sizeof(double));
    return v;
  }

 private:
  std::string path_;
  std::ifstream in_;
};

}  // namespace

ProxyIndex BuildProxyIndex(const BpeVocab& vocab, const ExemplarPool& pool,
                           const Embedder& embedder, size_t workers) {
  pool.RequireRepr(ReprKind::kAs);
  ProxyIndex index;
  index.dimension = embedder.dimension();
  index.embedder_fingerprint = embedder.Fingerprint();
  for (const Exemplar& e : pool.exemplars()) index.candidate_ids.push_back(e.id);
  for (const BpeToken& t : vocab.tokens) index.tokens.push_back(t.labels);

  const size_t n_tokens = index.tokens.size();
  const size_t n_pool = pool.size();
  index.token_candidate_sim.assign(n_tokens * n_pool, 0.0);
  const LabelInterner& interner = pool.interner(ReprKind::kAs);
  const auto& candidates = pool.AllSequences(ReprKind::kAs);
  ParallelFor(
      n_tokens,
      [&](size_t x) {
        const InternedSequence token =
            interner.EncodeQuery(ActionSequence{index.tokens[x]});
        for (size_t c = 0; c < n_pool; ++c) {
          index.token_candidate_sim[x * n_pool + c] =
              SimAs(token, candidates[c]);
        }
      },
      workers, 1);

  index.token_embeddings.reserve(n_tokens * index.dimension);
  for (const std::vector<std::string>& token : index.tokens) {
    const std::string text = TokenText(token);
    std::vector<double> e;
    try {
      e = embedder.Embed(text);
    } catch (const std::exception& err) {
      throw EmbedderError("embedding token '" + text + "' failed: " +
                          err.what());
    }
    if (e.size() != index.dimension) {
      throw EmbedderError("embedding token '" + text + "' returned " +
                          std::to_string(e.size()) + " dimensions, expected " +
                          std::to_string(index.dimension));
    }
    NormalizeInPlace(&e);
    index.token_embeddings.insert(index.token_embeddings.end(), e.begin(),
                                  e.end());
  }
  return index;
}

std::vector<double> ProxyScoreEmbedded(std::span<const double> query,
                                       const ProxyIndex& index,
                                       ProxyScoreOptions options) {
  if (query.size() != index.dimension) {
    throw EmbedderError("query embedding has " + std::to_string(query.size()) +
                        " dimensions, index expects " +
                        std::to_string(index.dimension));
  }
  const size_t n_pool = index.pool_size();
  std::vector<double> scores(n_pool, 0.0);
  for (size_t x = 0; x < index.token_count(); ++x) {
    double w = Cosine(query, index.Embedding(x));
    if (options.clamp_negative && w < 0.0) w = 0.0;
    if (w == 0.0) continue;
    const double* row = index.token_candidate_sim.data() + x * n_pool;
    for (size_t c = 0; c < n_pool; ++c) scores[c] += w * row[c];
  }
  return scores;
}

std::vector<double> ProxyScore(std::string_view task_text,
                               const ProxyIndex& index,
                               const Embedder& embedder,
                               ProxyScoreOptions options) {
  if (embedder.dimension() != index.dimension) {
    throw EmbedderError("embedder dimension " +
                        std::to_string(embedder.dimension()) +
                        " does not match index dimension " +
                        std::to_string(index.dimension));
  }
  if (embedder.Fingerprint() != index.embedder_fingerprint) {
    throw EmbedderError("embedder '" + embedder.Fingerprint() +
                        "' does not match index built with '" +
                        index.embedder_fingerprint + "'");
  }
  const std::vector<double> query = embedder.Embed(task_text);
  return ProxyScoreEmbedded(query, index, options);
}

void SaveProxyIndex(const ProxyIndex& index, const std::string& path) {
  Writer w(path);
  w.Bytes(kIndexMagic, sizeof kIndexMagic);
  w.U64(kIndexVersion);
  w.String(index.embedder_fingerprint);
  w.U64(index.dimension);
  w.U64(index.candidate_ids.size());
  for (const std::string& id : index.candidate_ids) w.String(id);
  w.U64(index.tokens.size());
  for (const auto& token : index.tokens) {
    w.U64(token.size());
    for (const std::string& label : token) w.String(label);
  }
  w.Doubles(index.token_candidate_sim);
  w.Doubles(index.token_embeddings);
}

ProxyIndex LoadProxyIndex(const std::string& path) {
  Reader r(path);
  char magic[sizeof kIndexMagic];
  r.Bytes(magic, sizeof magic);
  if (std::memcmp(magic, kIndexMagic, sizeof magic) != 0) {
    throw std::runtime_error("'" + path + "' is not a proxy index file");
  }
  if (r.U64() != kIndexVersion) {
    throw std::runtime_error("unsupported proxy index version in '" + path +
                             "'");
  }
  ProxyIndex index;
  index.embedder_fingerprint = r.String();
  index.dimension = r.U64();
  index.candidate_ids.resize(r.U64());
  for (std::string& id : index.candidate_ids) id = r.String();
  index.tokens.resize(r.U64());
  for (auto& token : index.tokens) {
    token.resize(r.U64());
    for (std::string& label : token) label = r.String();
  }
  index.token_candidate_sim = r.Doubles();
  index.token_embeddings = r.Doubles();
  if (index.token_candidate_sim.size() !=
          index.tokens.size() * index.candidate_ids.size() ||
      index.token_embeddings.size() != index.tokens.size() * index.dimension) {
    throw std::runtime_error("inconsistent matrix sizes in '" + path + "'");
  }
  return index;
}

}  // namespace plansel
