// Acceptance suite: one PASS/FAIL line per criterion.
//
// Usage: acceptance [criterion...]   (no arguments runs every criterion)
// Exit status is 0 iff every requested criterion passes.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <regex>
#include <sstream>

#include "fixtures.h"
#include "json.hpp"
#include "oracles.h"
#include "plansel/bpe.h"
#include "plansel/builtin_domains.h"
#include "plansel/flops.h"
#include "plansel/generator.h"
#include "plansel/pipeline.h"
#include "plansel/proxy.h"
#include "plansel/selection.h"
#include "plansel/similarity.h"
#include "synthetic.h"

using namespace plansel;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Labels = std::vector<std::string>;
using Clock = std::chrono::steady_clock;

// Pinned tolerances and budgets.
constexpr double kSimTolerance = 1e-12;
constexpr double kProxyTolerance = 1e-9;
constexpr double kLcasBudgetSeconds = 5.0;
constexpr double kSyntheticBudgetSeconds = 60.0;
constexpr double kRequiredGainPoints = 20.0;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void Expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("MISS " + what);
    }
  }
  void Note(const std::string& what) { notes.push_back(what); }
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Labels RandomLabels(std::mt19937_64& rng, size_t max_len, size_t alphabet, size_t min_len = 0) {
  Labels l(min_len + rng() % (max_len - min_len + 1));
  for (auto& s : l) s = std::string(1, static_cast<char>('a' + rng() % alphabet));
  return l;
}

Exemplar AsExemplar(const std::string& id, const Labels& labels) {
  Exemplar e;
  e.id = id;
  e.task_text = "task " + id;
  e.as = ActionSequence{labels};
  return e;
}

// --- criteria -------------------------------------------------------------

Outcome LcasOracle() {
  Outcome o;
  std::mt19937_64 rng(20240501);
  size_t mismatches = 0;
  const auto start = Clock::now();
  for (int i = 0; i < 1000; ++i) {
    const Labels a = RandomLabels(rng, 30, 1 + rng() % 8);
    const Labels b = RandomLabels(rng, 30, 1 + rng() % 8);
    if (Lcas(ActionSequence{a}, ActionSequence{b}).length != oracle::BruteForceLcas(a, b)) ++mismatches;
  }
  const double secs = Seconds(start);
  o.Expect(mismatches == 0, std::to_string(mismatches) + " of 1000 pairs disagree with brute force");
  o.Expect(secs < kLcasBudgetSeconds, "runtime " + Fmt(secs) + " s");
  o.Note("1000 pairs, " + std::to_string(mismatches) + " mismatches, " + Fmt(secs) + " s");
  return o;
}

Outcome SimAsSuite() {
  Outcome o;
  const auto sim = [](const Labels& a, const Labels& b) {
    return SimAs(ActionSequence{a}, ActionSequence{b});
  };
  // L = 1 over lengths 2 and 2: 1 / 4.
  o.Expect(std::abs(sim({"a", "b"}, {"b", "c"}) - 0.25) <= kSimTolerance, "0.25 case");
  o.Expect(std::abs(sim({"a", "b", "c"}, {"a", "b", "c"}) - 1.0) <= kSimTolerance, "identity");
  o.Expect(sim({}, {"a"}) == 0.0 && sim({"a"}, {}) == 0.0 && sim({}, {}) == 0.0, "empty gives 0");
  o.Expect(std::abs(sim({"q", "r"}, {"x", "q", "r", "y"}) - 0.5) <= kSimTolerance, "0.5 case");

  std::mt19937_64 rng(77);
  size_t asym = 0, out_of_bounds = 0, off_oracle = 0;
  for (int i = 0; i < 10000; ++i) {
    const Labels a = RandomLabels(rng, 20, 4);
    const Labels b = RandomLabels(rng, 20, 4);
    const double ab = sim(a, b), ba = sim(b, a);
    if (std::abs(ab - ba) > kSimTolerance) ++asym;
    if (ab < 0.0 || ab > 1.0) ++out_of_bounds;
    if (std::abs(ab - oracle::SimAs(a, b)) > kSimTolerance) ++off_oracle;
  }
  o.Expect(asym == 0, std::to_string(asym) + " asymmetric pairs");
  o.Expect(out_of_bounds == 0, std::to_string(out_of_bounds) + " pairs outside [0,1]");
  o.Expect(off_oracle == 0, std::to_string(off_oracle) + " pairs off the closed form");
  o.Note("formula cases exact to " + Fmt(kSimTolerance) + "; 10000 random pairs checked");
  return o;
}

Outcome ValidatorFixtures() {
  using plansel::testing::ReadFixture;
  Outcome o;
  const Domain d = LoadDomain("blocksworld-4ops");

  const ValidationReport bw4 =
      Validate(d, ParseProblem(ReadFixture("bw-rand-4.pddl"), d), ParsePlan(ReadFixture("bw-rand-4.plan")));
  o.Expect(bw4.goal_satisfied, "BW-rand-4 plan does not satisfy its goal");
  o.Note(std::string("BW-rand-4: goal_satisfied=") + (bw4.goal_satisfied ? "true" : "false"));

  const Problem original = ParseProblem(ReadFixture("bw-rand-6-original.pddl"), d);

  const Plan hps = ParsePlanTolerant(ReadFixture("bw-rand-6-high-plan-output.plan"), &d);
  const ValidationReport hps_r = Validate(d, original, hps);
  o.Expect(hps_r.goal_satisfied, "High-Plan-Similarity output does not validate");
  o.Note(std::string("High-Plan-Similarity: goal_satisfied=") + (hps_r.goal_satisfied ? "true" : "false") +
         (hps_r.failure_index ? ", fails at step " + std::to_string(*hps_r.failure_index) + " on " +
                                    (hps_r.failure && hps_r.failure->literal ? ToString(*hps_r.failure->literal) : "?")
                              : ""));

  // The annotated step is the line carrying "; wrong".
  const std::string hts_text = ReadFixture("bw-rand-6-high-task-output.plan");
  std::optional<size_t> annotated;
  {
    std::istringstream in(hts_text);
    std::string line;
    size_t step = 0;
    while (std::getline(in, line)) {
      if (line.find('(') == std::string::npos) continue;
      if (line.find("; wrong") != std::string::npos) annotated = step;
      ++step;
    }
  }
  const ValidationReport hts_r = Validate(d, original, ParsePlanTolerant(hts_text, &d));
  const bool at_annotation = annotated && hts_r.failure_index == annotated && hts_r.failure &&
                             hts_r.failure->reason == FailureReason::kPreconditionUnsatisfied;
  o.Expect(at_annotation, "High-Task-Similarity output does not fail at the annotated step");
  o.Note("High-Task-Similarity: annotated step " + (annotated ? std::to_string(*annotated) : "none") +
         ", validator failure at " +
         (hts_r.failure_index ? std::to_string(*hts_r.failure_index) : "none") +
         (hts_r.failure ? " (" + std::string(ToString(hts_r.failure->reason)) + ")" : ""));
  return o;
}

Outcome DcDeterminism() {
  Outcome o;
  // Two exact copies of the query (score 1.0), eight length-4 windows of it
  // (0.4) and ten distractors (0.025 or 0). Population sigma caps how many
  // candidates can sit above mu + k sigma, so the tiers use 2 and 0.25.
  Labels query;
  for (int i = 0; i < 10; ++i) query.push_back("q" + std::to_string(i));
  std::vector<Exemplar> ex;
  ex.push_back(AsExemplar("top-a", query));
  ex.push_back(AsExemplar("top-b", query));
  for (int i = 0; i < 8; ++i) {
    ex.push_back(AsExemplar("mid-" + std::to_string(i),
                            Labels(query.begin() + i % 7, query.begin() + i % 7 + 4)));
  }
  for (int i = 0; i < 10; ++i) {
    Labels l = {"n" + std::to_string(i), "m" + std::to_string(i), "k", "j"};
    if (i % 2 == 0) l[0] = "q" + std::to_string(i);
    ex.push_back(AsExemplar("noise-" + std::to_string(i), l));
  }
  const ExemplarPool pool(std::move(ex));
  DcConfig cfg;
  cfg.must_keep_sigma = 2.0;
  cfg.relevance_sigma = 0.25;
  const PlanQuery q = PlanQuery::Flat(ReprKind::kAs, ActionSequence{query});

  const SelectionResult first = DynamicClusterSelect(q, pool, cfg);
  bool identical = true;
  for (int run = 0; run < 10; ++run) {
    const SelectionResult r = DynamicClusterSelect(q, pool, cfg);
    identical = identical && r.selected_ids == first.selected_ids &&
                r.selected_scores == first.selected_scores &&
                r.cluster_assignment == first.cluster_assignment;
    for (const char* keep : {"top-a", "top-b"}) {
      o.Expect(std::find(r.selected_ids.begin(), r.selected_ids.end(), keep) != r.selected_ids.end(),
               std::string(keep) + " not selected in run " + std::to_string(run));
    }
  }
  o.Expect(identical, "output differs across 10 runs");
  o.Expect(first.must_keep_ids == std::vector<std::string>{"top-a", "top-b"}, "must-keep tier");
  o.Expect(first.diagnostics.relevance_size == 8, "relevance tier size " +
                                                      std::to_string(first.diagnostics.relevance_size));
  std::map<size_t, size_t> per_cluster;
  for (const std::string& id : first.selected_ids) {
    auto it = first.cluster_assignment.find(id);
    if (it != first.cluster_assignment.end()) ++per_cluster[it->second];
  }
  size_t worst = 0;
  for (const auto& [c, n] : per_cluster) worst = std::max(worst, n);
  o.Expect(worst <= cfg.per_cluster_cap, "cluster holds " + std::to_string(worst) + " picks");
  o.Expect(ClusterCount(16, 2) == 6, "cluster_count(16, 2) = " + std::to_string(ClusterCount(16, 2)));
  o.Expect(ClusterCount(81, 1) == 4, "cluster_count(81, 1) = " + std::to_string(ClusterCount(81, 1)));
  o.Note("selected " + std::to_string(first.selected_ids.size()) + " over " +
         std::to_string(first.diagnostics.cluster_count) + " clusters, max " + std::to_string(worst) +
         " per cluster; 10 identical runs; cluster_count(16,2)=" + std::to_string(ClusterCount(16, 2)) +
         ", (81,1)=" + std::to_string(ClusterCount(81, 1)));
  return o;
}

Outcome BpeCorrectness() {
  Outcome o;
  const std::vector<ActionSequence> corpus(3, ActionSequence{{"u", "p", "u", "p"}});
  // Hand trace: (u,p) occurs 6 times and merges first; each copy becomes
  // [up, up], so (up, up) merges next with frequency 3; after that no pair
  // remains. [u p] is consumed (final frequency 0), [u p u p] has 3.
  const BpeVocab v = BpeTrain(corpus, 10, 2);
  const std::vector<BpeMerge> expected_merges = {{{"u"}, {"p"}, 6}, {{"u", "p"}, {"u", "p"}, 3}};
  o.Expect(v.merge_log == expected_merges, "merge order");
  o.Expect(v.tokens == std::vector<BpeToken>{{{"u", "p", "u", "p"}, 3, 1}}, "final vocab");
  // Cutoff: raising min_frequency above 3 empties the vocab; the merges are
  // unchanged.
  const BpeVocab strict = BpeTrain(corpus, 10, 4);
  o.Expect(strict.tokens.empty() && strict.merge_log == expected_merges, "cutoff at 4");
  for (const BpeToken& t : BpeTrain(corpus, 10, 1).tokens) {
    o.Expect(t.frequency >= 1, "token below cutoff");
  }
  o.Note("merges (u,p)x6 then (up,up)x3; vocab {[u p u p]: 3}; min_frequency 4 gives empty vocab");
  return o;
}

// Counts embed calls.
class CountingEmbedder : public Embedder {
 public:
  explicit CountingEmbedder(const Embedder& inner) : inner_(inner) {}
  size_t dimension() const override { return inner_.dimension(); }
  std::vector<double> Embed(std::string_view text) const override {
    ++calls;
    return inner_.Embed(text);
  }
  std::string Fingerprint() const override { return inner_.Fingerprint(); }
  mutable size_t calls = 0;

 private:
  const Embedder& inner_;
};

Outcome ProxyOracle() {
  Outcome o;
  std::mt19937_64 rng(4242);
  std::vector<Exemplar> ex;
  std::vector<Labels> raw;
  for (int i = 0; i < 50; ++i) {
    raw.push_back(RandomLabels(rng, 12, 4, 1));
    ex.push_back(AsExemplar("c" + std::to_string(i), raw.back()));
  }
  const ExemplarPool pool(std::move(ex));
  BpeVocab vocab;
  std::vector<Labels> tokens;
  for (size_t i = 0; i < 10; ++i) {
    tokens.push_back(RandomLabels(rng, 4, 4, 2));
    vocab.tokens.push_back({tokens.back(), 1, i + 1});
  }
  const HashedEmbedder inner(64, 3);
  CountingEmbedder embedder(inner);
  const ProxyIndex index = BuildProxyIndex(vocab, pool, embedder);

  double worst = 0.0;
  bool one_call = true;
  for (const char* task : {"(on b1 b2) (clear b3)", "a b c d", "u p", ""}) {
    embedder.calls = 0;
    const std::vector<double> scores = ProxyScore(task, index, embedder);
    one_call = one_call && embedder.calls == 1;
    const std::vector<double> qv = inner.Embed(task);
    for (size_t c = 0; c < raw.size(); ++c) {
      double direct = 0.0;
      for (const Labels& t : tokens) {
        const std::vector<double> tv = inner.Embed(TokenText(t));
        double dot = 0.0;
        for (size_t k = 0; k < qv.size(); ++k) dot += qv[k] * tv[k];
        direct += dot * oracle::SimAs(t, raw[c]);
      }
      worst = std::max(worst, std::abs(scores[c] - direct));
    }
  }
  o.Expect(worst <= kProxyTolerance, "max deviation " + Fmt(worst));
  o.Expect(one_call, "query embedded more than once");
  o.Note("50 candidates x 10 tokens, 4 queries; max |index - direct| = " + Fmt(worst) +
         "; one embed call per query");
  return o;
}

double Accuracy(const RunResult& r, const std::vector<TestExample>& tests, size_t iteration) {
  std::vector<std::string> ids;
  for (const TestExample& t : tests) ids.push_back(t.id);
  return Evaluate(r.records, ids, iteration);
}

Outcome SyntheticGain() {
  Outcome o;
  const auto start = Clock::now();
  testing::SyntheticWorkload w = testing::MakeSyntheticWorkload(100, 300, 2024);
  const Domain d = LoadDomain("blocksworld-4ops");
  for (Exemplar& e : w.candidates) DeriveRepresentations(&e, &d);
  const ExemplarPool pool(std::move(w.candidates));
  ThresholdGenerator gen(w.references, 0.5);

  PipelineConfig grase;
  grase.mode = SelectionMode::kGraseTopN;
  grase.iterations = 2;
  grase.exemplar_count = 4;
  grase.initial_random_count = 4;
  grase.seed = 11;
  grase.concurrency = 4;
  PipelineConfig random = grase;
  random.mode = SelectionMode::kRandom;
  random.iterations = 1;

  const RunResult g = RunPipeline(w.tests, pool, gen, &d, grase);
  const RunResult b = RunPipeline(w.tests, pool, gen, &d, random);
  const double grase_acc = Accuracy(g, w.tests, 1);
  const double random_acc = Accuracy(b, w.tests, 0);
  const double gain = 100.0 * (grase_acc - random_acc);
  const double secs = Seconds(start);
  o.Expect(pool.size() == 400 && w.tests.size() == 100, "workload shape");
  o.Expect(gain >= kRequiredGainPoints, "gain " + Fmt(gain) + " points");
  o.Expect(secs < kSyntheticBudgetSeconds, "runtime " + Fmt(secs) + " s");
  o.Note("grase-topn N=4 " + Fmt(100 * grase_acc) + "% vs random N=4 " + Fmt(100 * random_acc) +
         "%: gain " + Fmt(gain) + " points, " + Fmt(secs) + " s");
  return o;
}

std::vector<std::string> ReadLines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// Removes the timestamp and wall-time members from a raw JSONL line.
std::string WithoutTimes(const std::string& line) {
  static const std::regex times(R"re(,?"(timestamp|wall_time_ms)":("[^"]*"|[-+0-9.eE]+))re");
  return std::regex_replace(line, times, "");
}

int Shell(const std::string& cmd) { return std::system(cmd.c_str()); }

Outcome Replay() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / ("plansel-replay-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);

  testing::SyntheticWorkload w = testing::MakeSyntheticWorkload(12, 36, 99);
  {
    std::ofstream pool(dir / "pool.jsonl");
    for (const Exemplar& e : w.candidates) {
      pool << json{{"id", e.id}, {"task", e.task_text}, {"plan_text", e.plan_text}}.dump() << '\n';
    }
    std::ofstream tests(dir / "tests.jsonl");
    json script = json::object();
    for (const TestExample& t : w.tests) {
      tests << json{{"id", t.id}, {"task", t.task_text}}.dump() << '\n';
      Plan draft = *t.reference;
      draft.steps.pop_back();
      script[t.id] = {"Here is the plan:\n" + testing::PlanText(draft) + "; draft",
                      testing::PlanText(*t.reference)};
    }
    std::ofstream(dir / "script.json") << script.dump(2);
    const json config = {
        {"mode", "grase-dc"},
        {"iterations", 3},
        {"val_gated", true},
        {"initial_random_count", 4},
        {"seed", 5},
        {"concurrency", 4},
        {"generator", {{"kind", "scripted"}, {"script", (dir / "script.json").string()}}},
        {"data",
         {{"pool", (dir / "pool.jsonl").string()},
          {"tests", (dir / "tests.jsonl").string()},
          {"domain", "blocksworld-4ops"}}},
        {"output",
         {{"results", (dir / "results.jsonl").string()},
          {"manifest", (dir / "manifest.json").string()}}}};
    std::ofstream(dir / "config.json") << config.dump(2);
  }
  const std::string cli = PLANSEL_CLI_PATH;
  const std::string quiet = " > " + (dir / "out.txt").string() + " 2>&1";
  const int first = Shell("\"" + cli + "\" run --config \"" + (dir / "config.json").string() + "\"" + quiet);
  const int second = Shell("\"" + cli + "\" run --manifest \"" + (dir / "manifest.json").string() + "\"" + quiet);
  o.Expect(first == 0, "original run exit status " + std::to_string(first));
  o.Expect(second == 0, "replay exit status " + std::to_string(second));

  const std::vector<std::string> a = ReadLines((dir / "results.jsonl").string());
  const std::vector<std::string> b = ReadLines((dir / "results.jsonl.replay.jsonl").string());
  o.Expect(!a.empty() && a.size() == b.size(), "record counts " + std::to_string(a.size()) + " vs " +
                                                   std::to_string(b.size()));
  size_t differing = 0;
  for (size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (WithoutTimes(a[i]) != WithoutTimes(b[i])) ++differing;
  }
  o.Expect(differing == 0, std::to_string(differing) + " lines differ beyond timestamps");
  o.Note(std::to_string(a.size()) + " records; " + std::to_string(differing) +
         " lines differ after removing timestamp and wall_time_ms");
  fs::remove_all(dir);
  return o;
}

Outcome Flops() {
  Outcome o;
  const FlopsScenario s;
  const double grase = EstimateFlops(s, FlopsMethod::kGrase).selection;
  const double proxy = EstimateFlops(s, FlopsMethod::kProxy).preparation;
  o.Expect(grase == 8.91e14, "grase selection " + Fmt(grase));
  o.Expect(proxy == 4e13, "proxy preparation " + Fmt(proxy));
  o.Note("grase selection " + Fmt(grase) + ", proxy preparation " + Fmt(proxy) + " (exact)");
  return o;
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& Criteria() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> all = {
      {"lcas_oracle", LcasOracle},
      {"sim_as", SimAsSuite},
      {"validator_fixtures", ValidatorFixtures},
      {"dc_determinism", DcDeterminism},
      {"bpe_correctness", BpeCorrectness},
      {"proxy_oracle", ProxyOracle},
      {"synthetic_gain", SyntheticGain},
      {"replay", Replay},
      {"flops", Flops},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> wanted(argv + 1, argv + argc);
  if (wanted.empty()) {
    for (const auto& [name, fn] : Criteria()) wanted.push_back(name);
  }
  bool all_pass = true;
  for (const std::string& name : wanted) {
    auto it = std::find_if(Criteria().begin(), Criteria().end(),
                           [&](const auto& c) { return c.first == name; });
    if (it == Criteria().end()) {
      std::cerr << "unknown criterion '" << name << "'\n";
      return 2;
    }
    Outcome out;
    try {
      out = it->second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.notes.push_back(std::string("exception: ") + e.what());
    }
    std::cout << (out.pass ? "PASS " : "FAIL ") << name;
    for (size_t i = 0; i < out.notes.size(); ++i) std::cout << (i == 0 ? ": " : "; ") << out.notes[i];
    std::cout << std::endl;
    all_pass = all_pass && out.pass;
  }
  return all_pass ? 0 : 1;
}
