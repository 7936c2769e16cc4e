// Byte-pair encoding over action sequences: each action label plays the role
// of a character, and frequent adjacent runs become tokens.

#ifndef PLANSEL_BPE_H_
#define PLANSEL_BPE_H_

#include <cstddef>
#include <string>
#include <vector>

#include "plansel/plan_repr.h"

namespace plansel {

struct BpeToken {
  std::vector<std::string> labels;
  // Occurrences in the segmented corpus after the last merge.
  size_t frequency = 0;
  // Index into the merge log of the merge that first produced this token.
  size_t merge_rank = 0;

  bool operator==(const BpeToken&) const = default;
};

struct BpeMerge {
  std::vector<std::string> left;
  std::vector<std::string> right;
  // Pair count when the merge was chosen.
  size_t frequency = 0;

  bool operator==(const BpeMerge&) const = default;
};

struct BpeVocab {
  // Ordered by merge rank.
  std::vector<BpeToken> tokens;
  std::vector<BpeMerge> merge_log;
  size_t max_merges = 0;
  size_t min_frequency = 0;

  bool operator==(const BpeVocab&) const = default;
};

inline constexpr size_t kDefaultBpeMerges = 500;
inline constexpr size_t kDefaultBpeMinFrequency = 200;

// Repeatedly merges the most frequent adjacent pair (ties: lexicographically
// smallest (left labels, right labels)) until max_merges merges are done or
// no pair occurs at least twice. Pairs are counted at every position, merges
// are applied left to right without overlap. Keeps merged tokens whose final
// frequency is at least min_frequency. Throws std::invalid_argument on an
// empty corpus.
BpeVocab BpeTrain(const std::vector<ActionSequence>& corpus,
                  size_t max_merges = kDefaultBpeMerges,
                  size_t min_frequency = kDefaultBpeMinFrequency);

// Textual form used for embedding: labels joined by single spaces.
std::string TokenText(const std::vector<std::string>& labels);

// JSON persistence with an embedded format version.
void SaveVocab(const BpeVocab& vocab, const std::string& path);
BpeVocab LoadVocab(const std::string& path);

}  // namespace plansel

#endif  // PLANSEL_BPE_H_
