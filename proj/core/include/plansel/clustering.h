// Agglomerative hierarchical clustering over a dense distance matrix.

#ifndef PLANSEL_CLUSTERING_H_
#define PLANSEL_CLUSTERING_H_

#include <cstddef>
#include <string_view>
#include <vector>

namespace plansel {

enum class Linkage { kAverage, kComplete, kSingle };

std::string_view ToString(Linkage linkage);
Linkage ParseLinkage(std::string_view text);

// Square, row-major, symmetric, zero diagonal.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(size_t n) : n_(n), values_(n * n, 0.0) {}

  size_t size() const { return n_; }
  double at(size_t i, size_t j) const { return values_[i * n_ + j]; }
  // Writes both (i, j) and (j, i).
  void Set(size_t i, size_t j, double value) {
    values_[i * n_ + j] = value;
    values_[j * n_ + i] = value;
  }

  // Throws std::invalid_argument if asymmetric, negative, non-finite or with
  // a nonzero diagonal.
  void Check() const;

 private:
  size_t n_;
  std::vector<double> values_;
};

// Starts from singletons and merges the closest pair of clusters until k
// remain. Ties go to the lexicographically smallest (lower item index, higher
// item index) pair, where each cluster is represented by its smallest item
// index; order items by id to get id-based tie-breaking.
//
// Returns one cluster index per item; clusters are numbered 0..k-1 in order
// of their smallest item. Throws std::invalid_argument if k is outside [1, n].
std::vector<size_t> AgglomerativeCluster(const DistanceMatrix& distances,
                                         size_t k, Linkage linkage);

}  // namespace plansel

#endif  // PLANSEL_CLUSTERING_H_
