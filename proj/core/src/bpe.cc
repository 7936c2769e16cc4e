#include "plansel/bpe.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "json.hpp"

namespace plansel {

namespace {

constexpr const char* kVocabFormat = "plansel-bpe-vocab";
constexpr int kVocabVersion = 1;

using SymbolId = uint32_t;

struct PairHash {
  size_t operator()(const std::pair<SymbolId, SymbolId>& p) const {
    return (static_cast<size_t>(p.first) << 32) ^ p.second;
  }
};

class SymbolTable {
 public:
  SymbolId Intern(const std::vector<std::string>& labels) {
    auto [it, inserted] =
        ids_.try_emplace(labels, static_cast<SymbolId>(labels_.size()));
    if (inserted) labels_.push_back(labels);
    return it->second;
  }
  const std::vector<std::string>& Labels(SymbolId id) const {
    return labels_[id];
  }

 private:
  std::map<std::vector<std::string>, SymbolId> ids_;
  std::vector<std::vector<std::string>> labels_;
};

}  // namespace

BpeVocab BpeTrain(const std::vector<ActionSequence>& corpus,
                  size_t max_merges, size_t min_frequency) {
  if (corpus.empty()) throw std::invalid_argument("BPE corpus is empty");
  SymbolTable symbols;
  std::vector<std::vector<SymbolId>> segmented;
  segmented.reserve(corpus.size());
  for (const ActionSequence& seq : corpus) {
    std::vector<SymbolId> ids;
    ids.reserve(seq.size());
    for (const std::string& label : seq.labels) {
      ids.push_back(symbols.Intern({label}));
    }
    segmented.push_back(std::move(ids));
  }

  BpeVocab vocab;
  vocab.max_merges = max_merges;
  vocab.min_frequency = min_frequency;
  std::map<SymbolId, size_t> first_rank;

  for (size_t merge = 0; merge < max_merges; ++merge) {
    std::unordered_map<std::pair<SymbolId, SymbolId>, size_t, PairHash> counts;
    for (const std::vector<SymbolId>& seq : segmented) {
      for (size_t i = 0; i + 1 < seq.size(); ++i) ++counts[{seq[i], seq[i + 1]}];
    }
    const std::pair<SymbolId, SymbolId>* best = nullptr;
    size_t best_count = 0;
    for (const auto& [pair, count] : counts) {
      if (count < 2) continue;
      if (best == nullptr || count > best_count ||
          (count == best_count &&
           std::tie(symbols.Labels(pair.first), symbols.Labels(pair.second)) <
               std::tie(symbols.Labels(best->first),
                        symbols.Labels(best->second)))) {
        best = &pair;
        best_count = count;
      }
    }
    if (best == nullptr) break;
    const auto [left, right] = *best;
    std::vector<std::string> joined = symbols.Labels(left);
    const std::vector<std::string>& right_labels = symbols.Labels(right);
    joined.insert(joined.end(), right_labels.begin(), right_labels.end());
    const SymbolId merged = symbols.Intern(joined);
    first_rank.try_emplace(merged, vocab.merge_log.size());
    vocab.merge_log.push_back(
        {symbols.Labels(left), symbols.Labels(right), best_count});

    for (std::vector<SymbolId>& seq : segmented) {
      std::vector<SymbolId> out;
      out.reserve(seq.size());
      for (size_t i = 0; i < seq.size(); ++i) {
        if (i + 1 < seq.size() && seq[i] == left && seq[i + 1] == right) {
          out.push_back(merged);
          ++i;
        } else {
          out.push_back(seq[i]);
        }
      }
      seq = std::move(out);
    }
  }

  std::map<SymbolId, size_t> final_counts;
  for (const std::vector<SymbolId>& seq : segmented) {
    for (SymbolId id : seq) ++final_counts[id];
  }
  std::vector<std::pair<size_t, SymbolId>> by_rank;
  for (const auto& [id, rank] : first_rank) by_rank.emplace_back(rank, id);
  std::sort(by_rank.begin(), by_rank.end());
  for (const auto& [rank, id] : by_rank) {
    auto it = final_counts.find(id);
    const size_t freq = it == final_counts.end() ? 0 : it->second;
    if (freq >= min_frequency) {
      vocab.tokens.push_back({symbols.Labels(id), freq, rank});
    }
  }
  return vocab;
}

std::string TokenText(const std::vector<std::string>& labels) {
  std::string out;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (i > 0) out += ' ';
    out += labels[i];
  }
  return out;
}

void SaveVocab(const BpeVocab& vocab, const std::string& path) {
  nlohmann::json j;
  j["format"] = kVocabFormat;
  j["version"] = kVocabVersion;
  j["max_merges"] = vocab.max_merges;
  j["min_frequency"] = vocab.min_frequency;
  j["tokens"] = nlohmann::json::array();
  for (const BpeToken& t : vocab.tokens) {
    j["tokens"].push_back({{"labels", t.labels},
                           {"frequency", t.frequency},
                           {"merge_rank", t.merge_rank}});
  }
  j["merges"] = nlohmann::json::array();
  for (const BpeMerge& m : vocab.merge_log) {
    j["merges"].push_back(
        {{"left", m.left}, {"right", m.right}, {"frequency", m.frequency}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write vocab file '" + path + "'");
  out << j.dump(1) << "\n";
}

BpeVocab LoadVocab(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read vocab file '" + path + "'");
  const nlohmann::json j = nlohmann::json::parse(in);
  if (j.value("format", "") != kVocabFormat) {
    throw std::runtime_error("'" + path + "' is not a BPE vocab file");
  }
  if (j.value("version", 0) != kVocabVersion) {
    throw std::runtime_error("unsupported vocab version in '" + path + "'");
  }
  BpeVocab vocab;
  vocab.max_merges = j.at("max_merges").get<size_t>();
  vocab.min_frequency = j.at("min_frequency").get<size_t>();
  for (const auto& t : j.at("tokens")) {
    vocab.tokens.push_back({t.at("labels").get<std::vector<std::string>>(),
                            t.at("frequency").get<size_t>(),
                            t.at("merge_rank").get<size_t>()});
  }
  for (const auto& m : j.at("merges")) {
    vocab.merge_log.push_back({m.at("left").get<std::vector<std::string>>(),
                               m.at("right").get<std::vector<std::string>>(),
                               m.at("frequency").get<size_t>()});
  }
  return vocab;
}

}  // namespace plansel
