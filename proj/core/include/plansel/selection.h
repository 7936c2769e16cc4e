// Exemplar ranking and dynamic-cluster selection.

#ifndef PLANSEL_SELECTION_H_
#define PLANSEL_SELECTION_H_

#include <map>
#include <string>
#include <vector>

#include "plansel/clustering.h"
#include "plansel/plan_repr.h"
#include "plansel/pool.h"

namespace plansel {

// A query plan in one representation. Flat kinds use `sequence`,
// object-centric kinds use `objects`.
struct PlanQuery {
  ReprKind kind = ReprKind::kAs;
  ActionSequence sequence;
  ObjectCentricSequences objects;

  static PlanQuery Flat(ReprKind kind, ActionSequence sequence);
  static PlanQuery ObjectCentric(ReprKind kind, ObjectCentricSequences objects);

  bool empty() const {
    return IsObjectCentric(kind) ? objects.empty() : sequence.empty();
  }
};

struct RankedCandidate {
  std::string candidate_id;
  double score = 0.0;
  size_t pool_index = 0;
};

// Similarity of every pool candidate to the query, in pool order. Throws
// ReprMismatchError when a candidate lacks the query's representation.
std::vector<double> ScoreCandidates(const PlanQuery& query,
                                    const ExemplarPool& pool,
                                    size_t workers = 0);

// Sorts by score descending, ties by ascending id.
std::vector<RankedCandidate> RankByScores(const ExemplarPool& pool,
                                          const std::vector<double>& scores);

std::vector<RankedCandidate> RankCandidates(const PlanQuery& query,
                                            const ExemplarPool& pool,
                                            size_t workers = 0);

std::vector<std::string> TopN(const std::vector<RankedCandidate>& ranking,
                              size_t n);

// floor((n^(1/4) + 1) * n_c), clamped to [1, n]. Requires n >= 1.
size_t ClusterCount(size_t n, size_t n_c);

struct DcConfig {
  size_t n_c = 1;
  double relevance_sigma = 1.0;
  double must_keep_sigma = 3.0;
  size_t per_cluster_cap = 2;
  Linkage linkage = Linkage::kAverage;

  // Throws std::invalid_argument.
  void Check() const;
};

struct SelectionDiagnostics {
  size_t pool_size = 0;
  size_t must_keep_size = 0;
  size_t relevance_size = 0;
  size_t cluster_count = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double relevance_threshold = 0.0;
  double must_keep_threshold = 0.0;
};

struct SelectionResult {
  // Query-score descending, ties by ascending id.
  std::vector<std::string> selected_ids;
  std::vector<double> selected_scores;
  std::vector<std::string> must_keep_ids;
  // Covers exactly the relevance set (must-keep excluded).
  std::map<std::string, size_t> cluster_assignment;
  SelectionDiagnostics diagnostics;
};

// Pairwise distances (reciprocal similarity) among pool members. Infinite
// entries become 10x the largest finite off-diagonal entry (10 when none is
// finite). Object-centric similarities are symmetrized by averaging both
// directions.
DistanceMatrix PairwiseDistances(const ExemplarPool& pool, ReprKind kind,
                                 const std::vector<size_t>& members,
                                 size_t workers = 0);

// Relevance filter, must-keep tier, clustering and capped per-cluster picks.
// Deterministic.
SelectionResult DynamicClusterSelect(const PlanQuery& query,
                                     const ExemplarPool& pool,
                                     const DcConfig& config,
                                     size_t workers = 0);

}  // namespace plansel

#endif  // PLANSEL_SELECTION_H_
