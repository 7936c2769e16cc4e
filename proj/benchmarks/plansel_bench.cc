// Micro-benchmarks for the hot paths: LCAS, batch scoring, clustering, BPE
// and DC selection.
#include <benchmark/benchmark.h>

#include <random>

#include "plansel/bpe.h"
#include "plansel/clustering.h"
#include "plansel/selection.h"
#include "plansel/similarity.h"

namespace {

using namespace plansel;

ActionSequence RandomSequence(std::mt19937_64& rng, size_t length, size_t alphabet) {
  ActionSequence s;
  for (size_t i = 0; i < length; ++i) s.labels.push_back("a" + std::to_string(rng() % alphabet));
  return s;
}

ExemplarPool RandomPool(size_t n, size_t length, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Exemplar> ex;
  for (size_t i = 0; i < n; ++i) {
    Exemplar e;
    e.id = "c" + std::to_string(100000 + i);
    e.as = RandomSequence(rng, 1 + rng() % length, 4);
    ex.push_back(std::move(e));
  }
  return ExemplarPool(std::move(ex));
}

void BM_Lcas(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const size_t n = static_cast<size_t>(state.range(0));
  const ActionSequence a = RandomSequence(rng, n, 4);
  const ActionSequence b = RandomSequence(rng, n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(SimAs(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Lcas)->RangeMultiplier(2)->Range(8, 256)->Complexity(benchmark::oNSquared);

void BM_ScoreBatch(benchmark::State& state) {
  const ExemplarPool pool = RandomPool(static_cast<size_t>(state.range(0)), 40, 2);
  std::mt19937_64 rng(3);
  const InternedSequence query = pool.interner(ReprKind::kAs).EncodeQuery(RandomSequence(rng, 30, 4));
  const size_t workers = static_cast<size_t>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ScoreBatch(query, pool.AllSequences(ReprKind::kAs), workers));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ScoreBatch)->UseRealTime()->Args({1000, 1})->Args({1000, 4})->Args({10000, 1})->Args({10000, 4});

void BM_Cluster(benchmark::State& state) {
  const size_t n = static_cast<size_t>(state.range(0));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(1.0, 10.0);
  DistanceMatrix d(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) d.Set(i, j, u(rng));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(AgglomerativeCluster(d, ClusterCount(n, 1), Linkage::kAverage));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Cluster)->RangeMultiplier(2)->Range(32, 512)->Complexity();

void BM_DcSelect(benchmark::State& state) {
  const ExemplarPool pool = RandomPool(static_cast<size_t>(state.range(0)), 30, 5);
  std::mt19937_64 rng(6);
  const PlanQuery q = PlanQuery::Flat(ReprKind::kAs, RandomSequence(rng, 20, 4));
  for (auto _ : state) benchmark::DoNotOptimize(DynamicClusterSelect(q, pool, DcConfig{}));
}
BENCHMARK(BM_DcSelect)->Arg(1000)->Arg(5000);

void BM_BpeTrain(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::vector<ActionSequence> corpus;
  for (int64_t i = 0; i < state.range(0); ++i) corpus.push_back(RandomSequence(rng, 20, 4));
  for (auto _ : state) benchmark::DoNotOptimize(BpeTrain(corpus, 100, 2));
}
BENCHMARK(BM_BpeTrain)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
