#include "plansel/clustering.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>

#include "plansel/sexpr.h"

namespace plansel {

std::string_view ToString(Linkage linkage) {
  switch (linkage) {
    case Linkage::kAverage:
      return "average";
    case Linkage::kComplete:
      return "complete";
    case Linkage::kSingle:
      return "single";
  }
  return "average";
}

Linkage ParseLinkage(std::string_view text) {
  const std::string lower = ToLower(text);
  if (lower == "average") return Linkage::kAverage;
  if (lower == "complete") return Linkage::kComplete;
  if (lower == "single") return Linkage::kSingle;
  throw std::invalid_argument("unknown linkage '" + std::string(text) +
                              "' (expected average, complete or single)");
}

void DistanceMatrix::Check() const {
  for (size_t i = 0; i < n_; ++i) {
    if (at(i, i) != 0.0) {
      throw std::invalid_argument("distance matrix has nonzero diagonal");
    }
    for (size_t j = i + 1; j < n_; ++j) {
      const double d = at(i, j);
      if (!std::isfinite(d) || d < 0.0) {
        throw std::invalid_argument(
            "distance matrix entries must be finite and non-negative");
      }
      if (d != at(j, i)) {
        throw std::invalid_argument("distance matrix is not symmetric");
      }
    }
  }
}

namespace {

// Total order on candidate merges: distance, then (low slot, high slot).
// Each active cluster lives in the slot of its smallest item, so slot
// comparison is member-index comparison.
struct MergeKey {
  double distance = std::numeric_limits<double>::infinity();
  size_t lo = std::numeric_limits<size_t>::max();
  size_t hi = std::numeric_limits<size_t>::max();

  bool operator<(const MergeKey& o) const {
    return std::tie(distance, lo, hi) < std::tie(o.distance, o.lo, o.hi);
  }
};

MergeKey MakeKey(double d, size_t a, size_t b) {
  return a < b ? MergeKey{d, a, b} : MergeKey{d, b, a};
}

}  // namespace

std::vector<size_t> AgglomerativeCluster(const DistanceMatrix& distances,
                                         size_t k, Linkage linkage) {
  const size_t n = distances.size();
  if (n == 0 || k < 1 || k > n) {
    throw std::invalid_argument("cluster count " + std::to_string(k) +
                                " outside [1, " + std::to_string(n) + "]");
  }
  distances.Check();

  DistanceMatrix d = distances;
  std::vector<bool> active(n, true);
  std::vector<size_t> cluster_size(n, 1);
  std::vector<size_t> parent(n);
  for (size_t i = 0; i < n; ++i) parent[i] = i;
  std::vector<size_t> nearest(n, 0);

  auto recompute_nearest = [&](size_t i) {
    MergeKey best;
    for (size_t j = 0; j < n; ++j) {
      if (j == i || !active[j]) continue;
      const MergeKey key = MakeKey(d.at(i, j), i, j);
      if (key < best) {
        best = key;
        nearest[i] = j;
      }
    }
  };
  for (size_t i = 0; i < n; ++i) recompute_nearest(i);

  for (size_t remaining = n; remaining > k; --remaining) {
    MergeKey best;
    for (size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      const MergeKey key = MakeKey(d.at(i, nearest[i]), i, nearest[i]);
      if (key < best) best = key;
    }
    const size_t keep = best.lo;
    const size_t gone = best.hi;
    for (size_t m = 0; m < n; ++m) {
      if (!active[m] || m == keep || m == gone) continue;
      const double dk = d.at(m, keep);
      const double dg = d.at(m, gone);
      double merged = 0.0;
      switch (linkage) {
        case Linkage::kSingle:
          merged = std::min(dk, dg);
          break;
        case Linkage::kComplete:
          merged = std::max(dk, dg);
          break;
        case Linkage::kAverage:
          merged = (static_cast<double>(cluster_size[keep]) * dk +
                    static_cast<double>(cluster_size[gone]) * dg) /
                   static_cast<double>(cluster_size[keep] + cluster_size[gone]);
          break;
      }
      d.Set(m, keep, merged);
    }
    active[gone] = false;
    parent[gone] = keep;
    cluster_size[keep] += cluster_size[gone];

    if (remaining - 1 == k) break;
    recompute_nearest(keep);
    for (size_t m = 0; m < n; ++m) {
      if (!active[m] || m == keep) continue;
      if (nearest[m] == keep || nearest[m] == gone) {
        recompute_nearest(m);
      } else if (MakeKey(d.at(m, keep), m, keep) <
                 MakeKey(d.at(m, nearest[m]), m, nearest[m])) {
        nearest[m] = keep;
      }
    }
  }

  // Resolve each item to its surviving slot, then number slots in order.
  std::vector<size_t> slot_to_cluster(n, 0);
  size_t next = 0;
  for (size_t i = 0; i < n; ++i) {
    if (active[i]) slot_to_cluster[i] = next++;
  }
  std::vector<size_t> assignment(n);
  for (size_t i = 0; i < n; ++i) {
    size_t root = i;
    while (parent[root] != root) root = parent[root];
    assignment[i] = slot_to_cluster[root];
  }
  return assignment;
}

}  // namespace plansel
