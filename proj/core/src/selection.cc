#include "plansel/selection.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "plansel/parallel.h"

namespace plansel {

namespace {

double ObjectSim(const std::vector<InternedSequence>& test,
                 const std::vector<InternedSequence>& candidate) {
  if (test.empty() || candidate.empty()) return 0.0;
  double total = 0.0;
  for (const InternedSequence& t : test) {
    double best = 0.0;
    for (const InternedSequence& c : candidate) {
      best = std::max(best, SimAs(t, c));
    }
    total += best;
  }
  return total / static_cast<double>(test.size());
}

bool ByScoreThenId(const ExemplarPool& pool, size_t a, size_t b,
                   const std::vector<double>& scores) {
  if (scores[a] != scores[b]) return scores[a] > scores[b];
  return pool.at(a).id < pool.at(b).id;
}

}  // namespace

PlanQuery PlanQuery::Flat(ReprKind kind, ActionSequence sequence) {
  if (IsObjectCentric(kind)) {
    throw ReprMismatchError("flat query built for object-centric kind " +
                            std::string(ToString(kind)));
  }
  PlanQuery q;
  q.kind = kind;
  q.sequence = std::move(sequence);
  return q;
}

PlanQuery PlanQuery::ObjectCentric(ReprKind kind,
                                   ObjectCentricSequences objects) {
  if (!IsObjectCentric(kind)) {
    throw ReprMismatchError("object-centric query built for flat kind " +
                            std::string(ToString(kind)));
  }
  PlanQuery q;
  q.kind = kind;
  q.objects = std::move(objects);
  return q;
}

std::vector<double> ScoreCandidates(const PlanQuery& query,
                                    const ExemplarPool& pool, size_t workers) {
  pool.RequireRepr(query.kind);
  const LabelInterner& interner = pool.interner(query.kind);
  if (!IsObjectCentric(query.kind)) {
    return ScoreBatch(interner.EncodeQuery(query.sequence),
                      pool.AllSequences(query.kind), workers);
  }
  std::vector<InternedSequence> test;
  for (const auto& [object, seq] : query.objects.per_object) {
    test.push_back(interner.EncodeQuery(seq));
  }
  std::vector<double> scores(pool.size(), 0.0);
  ParallelFor(
      pool.size(),
      [&](size_t i) { scores[i] = ObjectSim(test, pool.Objects(query.kind, i)); },
      workers);
  return scores;
}

std::vector<RankedCandidate> RankByScores(const ExemplarPool& pool,
                                          const std::vector<double>& scores) {
  if (scores.size() != pool.size()) {
    throw std::invalid_argument("score vector does not match pool size");
  }
  std::vector<size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return ByScoreThenId(pool, a, b, scores);
  });
  std::vector<RankedCandidate> ranking;
  ranking.reserve(order.size());
  for (size_t i : order) ranking.push_back({pool.at(i).id, scores[i], i});
  return ranking;
}

std::vector<RankedCandidate> RankCandidates(const PlanQuery& query,
                                            const ExemplarPool& pool,
                                            size_t workers) {
  return RankByScores(pool, ScoreCandidates(query, pool, workers));
}

std::vector<std::string> TopN(const std::vector<RankedCandidate>& ranking,
                              size_t n) {
  std::vector<std::string> ids;
  const size_t count = std::min(n, ranking.size());
  ids.reserve(count);
  for (size_t i = 0; i < count; ++i) ids.push_back(ranking[i].candidate_id);
  return ids;
}

size_t ClusterCount(size_t n, size_t n_c) {
  if (n == 0) throw std::invalid_argument("ClusterCount requires n >= 1");
  // Two square roots are exact on perfect fourth powers, unlike pow(n, 0.25).
  const double fourth_root = std::sqrt(std::sqrt(static_cast<double>(n)));
  const double raw = (fourth_root + 1.0) * static_cast<double>(n_c);
  const auto count = static_cast<size_t>(std::floor(raw + 1e-9));
  return std::clamp<size_t>(count, 1, n);
}

void DcConfig::Check() const {
  if (n_c < 1) throw std::invalid_argument("n_c must be >= 1");
  if (per_cluster_cap < 1) {
    throw std::invalid_argument("per_cluster_cap must be >= 1");
  }
  if (must_keep_sigma < relevance_sigma) {
    throw std::invalid_argument("must_keep_sigma must be >= relevance_sigma");
  }
}

DistanceMatrix PairwiseDistances(const ExemplarPool& pool, ReprKind kind,
                                 const std::vector<size_t>& members,
                                 size_t workers) {
  const size_t n = members.size();
  std::vector<double> sims(n * n, 0.0);
  ParallelFor(
      n,
      [&](size_t i) {
        for (size_t j = i + 1; j < n; ++j) {
          double s = 0.0;
          if (IsObjectCentric(kind)) {
            const auto& a = pool.Objects(kind, members[i]);
            const auto& b = pool.Objects(kind, members[j]);
            s = 0.5 * (ObjectSim(a, b) + ObjectSim(b, a));
          } else {
            s = SimAs(pool.Sequence(kind, members[i]),
                      pool.Sequence(kind, members[j]));
          }
          sims[i * n + j] = s;
        }
      },
      workers, 8);

  double max_finite = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const Distance d = Distance::FromScore(sims[i * n + j]);
      if (!d.is_infinite()) max_finite = std::max(max_finite, d.value());
    }
  }
  const double far = max_finite > 0.0 ? 10.0 * max_finite : 10.0;
  DistanceMatrix matrix(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const Distance d = Distance::FromScore(sims[i * n + j]);
      matrix.Set(i, j, d.is_infinite() ? far : d.value());
    }
  }
  return matrix;
}

SelectionResult DynamicClusterSelect(const PlanQuery& query,
                                     const ExemplarPool& pool,
                                     const DcConfig& config, size_t workers) {
  config.Check();
  SelectionResult result;
  SelectionDiagnostics& diag = result.diagnostics;
  diag.pool_size = pool.size();
  if (pool.empty()) return result;

  const std::vector<double> scores = ScoreCandidates(query, pool, workers);
  const double n = static_cast<double>(scores.size());
  diag.mean = std::accumulate(scores.begin(), scores.end(), 0.0) / n;
  double sq = 0.0;
  for (double s : scores) sq += (s - diag.mean) * (s - diag.mean);
  diag.stddev = std::sqrt(sq / n);
  if (std::all_of(scores.begin(), scores.end(),
                  [&](double s) { return s == scores.front(); })) {
    // Summation rounding must not push the threshold above a constant score.
    diag.mean = scores.front();
    diag.stddev = 0.0;
  }
  diag.must_keep_threshold = diag.mean + config.must_keep_sigma * diag.stddev;
  diag.relevance_threshold = diag.mean + config.relevance_sigma * diag.stddev;

  // Members are visited in id order so cluster tie-breaks follow ids.
  std::vector<size_t> by_id(pool.size());
  std::iota(by_id.begin(), by_id.end(), 0);
  std::sort(by_id.begin(), by_id.end(), [&](size_t a, size_t b) {
    return pool.at(a).id < pool.at(b).id;
  });

  std::vector<size_t> must_keep;
  std::vector<size_t> relevant;
  for (size_t i : by_id) {
    if (scores[i] >= diag.must_keep_threshold) {
      must_keep.push_back(i);
    } else if (scores[i] >= diag.relevance_threshold) {
      relevant.push_back(i);
    }
  }
  diag.must_keep_size = must_keep.size();
  diag.relevance_size = relevant.size();

  std::vector<size_t> chosen = must_keep;
  if (!relevant.empty()) {
    diag.cluster_count = ClusterCount(relevant.size(), config.n_c);
    const DistanceMatrix distances =
        PairwiseDistances(pool, query.kind, relevant, workers);
    const std::vector<size_t> assignment =
        AgglomerativeCluster(distances, diag.cluster_count, config.linkage);
    std::vector<std::vector<size_t>> clusters(diag.cluster_count);
    for (size_t m = 0; m < relevant.size(); ++m) {
      clusters[assignment[m]].push_back(relevant[m]);
      result.cluster_assignment[pool.at(relevant[m]).id] = assignment[m];
    }
    for (std::vector<size_t>& members : clusters) {
      std::sort(members.begin(), members.end(), [&](size_t a, size_t b) {
        return ByScoreThenId(pool, a, b, scores);
      });
      const size_t take = std::min(config.per_cluster_cap, members.size());
      chosen.insert(chosen.end(), members.begin(), members.begin() + take);
    }
  }

  std::sort(chosen.begin(), chosen.end(), [&](size_t a, size_t b) {
    return ByScoreThenId(pool, a, b, scores);
  });
  for (size_t i : chosen) {
    result.selected_ids.push_back(pool.at(i).id);
    result.selected_scores.push_back(scores[i]);
  }
  std::sort(must_keep.begin(), must_keep.end(), [&](size_t a, size_t b) {
    return ByScoreThenId(pool, a, b, scores);
  });
  for (size_t i : must_keep) result.must_keep_ids.push_back(pool.at(i).id);
  return result;
}

}  // namespace plansel
