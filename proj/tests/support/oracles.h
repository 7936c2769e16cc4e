// Reference implementations written for clarity, not speed. They share no
// code with the library and are the ground truth the fast paths are checked
// against.
#ifndef PLANSEL_TESTS_ORACLES_H_
#define PLANSEL_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace plansel::oracle {

using Labels = std::vector<std::string>;

// Enumerates every contiguous run of `a` and checks whether it occurs in `b`.
inline size_t BruteForceLcas(const Labels& a, const Labels& b) {
  size_t best = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t len = 1; i + len <= a.size(); ++len) {
      bool found = false;
      for (size_t j = 0; j + len <= b.size() && !found; ++j) {
        found = std::equal(a.begin() + i, a.begin() + i + len, b.begin() + j);
      }
      if (found) best = std::max(best, len);
    }
  }
  return best;
}

inline double SimAs(const Labels& a, const Labels& b) {
  if (a.empty() || b.empty()) return 0.0;
  const double l = static_cast<double>(BruteForceLcas(a, b));
  return l * l / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

// Naive agglomerative clustering: recomputes every cluster-pair linkage from
// the raw matrix on each round. Ties go to the pair whose smallest members
// compare lexicographically smallest.
inline std::vector<size_t> NaiveCluster(
    const std::vector<std::vector<double>>& d, size_t k,
    const std::string& linkage) {
  std::vector<std::vector<size_t>> clusters;
  for (size_t i = 0; i < d.size(); ++i) clusters.push_back({i});
  auto link = [&](const std::vector<size_t>& x, const std::vector<size_t>& y) {
    double best = linkage == "single" ? std::numeric_limits<double>::infinity()
                                      : (linkage == "complete" ? -1.0 : 0.0);
    for (size_t i : x) {
      for (size_t j : y) {
        if (linkage == "single") best = std::min(best, d[i][j]);
        else if (linkage == "complete") best = std::max(best, d[i][j]);
        else best += d[i][j];
      }
    }
    if (linkage == "average") best /= static_cast<double>(x.size() * y.size());
    return best;
  };
  while (clusters.size() > k) {
    size_t bi = 0, bj = 1;
    double best = std::numeric_limits<double>::infinity();
    std::pair<size_t, size_t> best_key{0, 0};
    for (size_t i = 0; i < clusters.size(); ++i) {
      for (size_t j = i + 1; j < clusters.size(); ++j) {
        const double v = link(clusters[i], clusters[j]);
        std::pair<size_t, size_t> key{
            std::min(clusters[i].front(), clusters[j].front()),
            std::max(clusters[i].front(), clusters[j].front())};
        if (v < best - 1e-12 || (std::abs(v - best) <= 1e-12 && key < best_key)) {
          best = v;
          bi = i;
          bj = j;
          best_key = key;
        }
      }
    }
    clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(),
                        clusters[bj].end());
    std::sort(clusters[bi].begin(), clusters[bi].end());
    clusters.erase(clusters.begin() + static_cast<long>(bj));
  }
  std::sort(clusters.begin(), clusters.end());
  std::vector<size_t> out(d.size());
  for (size_t c = 0; c < clusters.size(); ++c) {
    for (size_t i : clusters[c]) out[i] = c;
  }
  return out;
}

// Plain BPE over label sequences: rescans the corpus after every merge.
struct BpeResult {
  std::vector<std::pair<Labels, size_t>> merges;  // merged token, frequency
  std::map<Labels, size_t> final_counts;
};

inline BpeResult NaiveBpe(const std::vector<Labels>& corpus,
                          size_t max_merges) {
  std::vector<std::vector<Labels>> seqs;
  for (const Labels& s : corpus) {
    std::vector<Labels> units;
    for (const std::string& l : s) units.push_back({l});
    seqs.push_back(units);
  }
  BpeResult result;
  for (size_t m = 0; m < max_merges; ++m) {
    std::map<std::pair<Labels, Labels>, size_t> counts;
    for (const auto& s : seqs) {
      for (size_t i = 0; i + 1 < s.size(); ++i) ++counts[{s[i], s[i + 1]}];
    }
    // std::map order is lexicographic on (left, right): first maximum wins.
    const std::pair<Labels, Labels>* best = nullptr;
    size_t best_n = 0;
    for (const auto& [pair, n] : counts) {
      if (n > best_n) {
        best = &pair;
        best_n = n;
      }
    }
    if (best == nullptr || best_n < 2) break;
    const auto pair = *best;
    Labels merged = pair.first;
    merged.insert(merged.end(), pair.second.begin(), pair.second.end());
    for (auto& s : seqs) {
      std::vector<Labels> next;
      for (size_t i = 0; i < s.size(); ++i) {
        if (i + 1 < s.size() && s[i] == pair.first && s[i + 1] == pair.second) {
          next.push_back(merged);
          ++i;
        } else {
          next.push_back(s[i]);
        }
      }
      s = std::move(next);
    }
    result.merges.push_back({merged, best_n});
  }
  for (const auto& s : seqs) {
    for (const Labels& u : s) ++result.final_counts[u];
  }
  return result;
}

}  // namespace plansel::oracle

#endif  // PLANSEL_TESTS_ORACLES_H_
