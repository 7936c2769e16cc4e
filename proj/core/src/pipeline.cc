#include "plansel/pipeline.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <map>
#include <mutex>
#include <set>
#include <numeric>
#include <thread>

#include "plansel/logging.h"
#include "plansel/prompt.h"
#include "plansel/sexpr.h"

namespace plansel {

namespace {

uint64_t SplitMix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t StableHash(std::string_view text) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Sampling uses the raw generator output, not std distributions, so draws are
// identical across standard library implementations.
class DrawStream {
 public:
  DrawStream(uint64_t seed, std::string_view test_id, size_t iteration)
      : state_(SplitMix(seed) ^ SplitMix(StableHash(test_id)) ^
               SplitMix(0xa5a5a5a5ULL + iteration)) {}

  uint64_t Next() {
    state_ = SplitMix(state_);
    return state_;
  }

  // k distinct indices of [0, n) in draw order.
  std::vector<size_t> Sample(size_t n, size_t k) {
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    k = std::min(k, n);
    for (size_t i = 0; i < k; ++i) {
      const size_t j = i + static_cast<size_t>(Next() % (n - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
  }

 private:
  uint64_t state_;
};

SelectionOutcome RandomOutcome(const TestExample& test, size_t iteration,
                               const ExemplarPool& pool,
                               const PipelineConfig& config, size_t count,
                               SelectionRule rule) {
  DrawStream draws(config.seed, test.id, iteration);
  SelectionOutcome out;
  out.rule = rule;
  for (size_t i : draws.Sample(pool.size(), count)) {
    out.selected.push_back({pool.at(i).id, std::nullopt});
  }
  return out;
}

SelectionOutcome TopOutcome(const std::vector<RankedCandidate>& ranking,
                            size_t count, SelectionRule rule) {
  SelectionOutcome out;
  out.rule = rule;
  for (size_t i = 0; i < std::min(count, ranking.size()); ++i) {
    out.selected.push_back({ranking[i].candidate_id, ranking[i].score});
  }
  return out;
}

std::optional<Problem> TryParseProblem(const TestExample& test,
                                       const Domain* domain) {
  if (domain == nullptr) return std::nullopt;
  try {
    return ParseProblem(test.task_text, *domain);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

RecordValidation ToRecordValidation(const ValidationReport& report) {
  RecordValidation v;
  v.executable = report.executable;
  v.failure_index = report.failure_index;
  v.goal_satisfied = report.goal_satisfied;
  if (report.failure) {
    v.failure_reason = std::string(ToString(report.failure->reason));
    v.failure_detail = report.failure->detail;
    if (report.failure->literal) v.failure_literal = ToString(*report.failure->literal);
  }
  return v;
}

std::string UtcTimestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string_view ToString(SelectionMode mode) {
  switch (mode) {
    case SelectionMode::kRandom:
      return "random";
    case SelectionMode::kTaskSim:
      return "task-sim";
    case SelectionMode::kAsOracle:
      return "as-oracle";
    case SelectionMode::kGraseTopN:
      return "grase-topn";
    case SelectionMode::kGraseDc:
      return "grase-dc";
  }
  return "random";
}

SelectionMode ParseSelectionMode(std::string_view text) {
  const std::string lower = ToLower(text);
  for (SelectionMode m : {SelectionMode::kRandom, SelectionMode::kTaskSim,
                          SelectionMode::kAsOracle, SelectionMode::kGraseTopN,
                          SelectionMode::kGraseDc}) {
    if (lower == ToString(m)) return m;
  }
  throw std::invalid_argument(
      "unknown mode '" + std::string(text) +
      "' (expected random, task-sim, as-oracle, grase-topn or grase-dc)");
}

std::string_view ToString(SelectionRule rule) {
  switch (rule) {
    case SelectionRule::kRandom:
      return "random";
    case SelectionRule::kRandomFallback:
      return "random-fallback";
    case SelectionRule::kTaskSim:
      return "task-sim";
    case SelectionRule::kAsOracle:
      return "as-oracle";
    case SelectionRule::kGraseTopN:
      return "grase-topn";
    case SelectionRule::kGraseDc:
      return "grase-dc";
  }
  return "random";
}

SelectionRule ParseSelectionRule(std::string_view text) {
  for (SelectionRule r :
       {SelectionRule::kRandom, SelectionRule::kRandomFallback,
        SelectionRule::kTaskSim, SelectionRule::kAsOracle,
        SelectionRule::kGraseTopN, SelectionRule::kGraseDc}) {
    if (text == ToString(r)) return r;
  }
  throw std::invalid_argument("unknown selection rule '" + std::string(text) + "'");
}

void PipelineConfig::Check(const std::vector<TestExample>& tests,
                           bool has_domain) const {
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (concurrency < 1) throw std::invalid_argument("concurrency must be >= 1");
  if (max_output_tokens < 1) {
    throw std::invalid_argument("max_output_tokens must be >= 1");
  }
  dc.Check();
  if (val_gated && !has_domain) {
    throw std::invalid_argument("val_gated requires a domain to validate against");
  }
  if (mode == SelectionMode::kAsOracle) {
    for (const TestExample& t : tests) {
      if (!t.reference) {
        throw std::invalid_argument("as-oracle mode needs a reference plan for test '" +
                                    t.id + "'");
      }
    }
  }
}

PlanQuery BuildQuery(ReprKind kind, const Plan& plan, const TestExample& test,
                     const Domain* domain) {
  switch (kind) {
    case ReprKind::kAs:
      return PlanQuery::Flat(kind, ToAs(plan));
    case ReprKind::kOas:
      return PlanQuery::ObjectCentric(kind, ToOas(plan));
    case ReprKind::kEs:
    case ReprKind::kOes:
      break;
  }
  const std::optional<Problem> problem = TryParseProblem(test, domain);
  if (!problem) {
    return kind == ReprKind::kEs ? PlanQuery::Flat(kind, {})
                                 : PlanQuery::ObjectCentric(kind, {});
  }
  const std::vector<StateEvent> trace =
      ExecutablePrefixTrace(*domain, *problem, plan);
  return kind == ReprKind::kEs ? PlanQuery::Flat(kind, EsFromTrace(trace))
                               : PlanQuery::ObjectCentric(kind, OesFromTrace(trace));
}

SelectionOutcome SelectForIteration(const TestExample& test,
                                    const Plan* previous_plan,
                                    size_t iteration, const ExemplarPool& pool,
                                    const Domain* domain,
                                    const PipelineConfig& config) {
  auto fallback = [&] {
    return RandomOutcome(test, iteration, pool, config, config.exemplar_count,
                         SelectionRule::kRandomFallback);
  };
  auto ranked = [&](const Plan& plan, SelectionRule rule) {
    const PlanQuery query = BuildQuery(config.repr, plan, test, domain);
    if (query.empty()) return fallback();
    const auto ranking = RankCandidates(query, pool);
    if (ranking.empty() || ranking.front().score == 0.0) return fallback();
    return TopOutcome(ranking, config.exemplar_count, rule);
  };

  switch (config.mode) {
    case SelectionMode::kRandom:
      return RandomOutcome(test, iteration, pool, config, config.exemplar_count,
                           SelectionRule::kRandom);
    case SelectionMode::kTaskSim: {
      const std::set<std::string> tokens = TaskTokens(test.task_text);
      std::vector<double> scores(pool.size());
      for (size_t i = 0; i < pool.size(); ++i) {
        scores[i] = SimTask(tokens, pool.TaskTokenSet(i));
      }
      return TopOutcome(RankByScores(pool, scores), config.exemplar_count,
                        SelectionRule::kTaskSim);
    }
    case SelectionMode::kAsOracle:
      if (!test.reference) {
        throw std::invalid_argument("test '" + test.id + "' has no reference plan");
      }
      return ranked(*test.reference, SelectionRule::kAsOracle);
    case SelectionMode::kGraseTopN:
    case SelectionMode::kGraseDc:
      break;
  }

  if (iteration == 0) {
    return RandomOutcome(test, iteration, pool, config,
                         config.initial_random_count, SelectionRule::kRandom);
  }
  if (previous_plan == nullptr) return fallback();
  if (config.mode == SelectionMode::kGraseTopN) {
    return ranked(*previous_plan, SelectionRule::kGraseTopN);
  }
  const PlanQuery query = BuildQuery(config.repr, *previous_plan, test, domain);
  if (query.empty()) return fallback();
  const SelectionResult dc = DynamicClusterSelect(query, pool, config.dc);
  if (dc.selected_ids.empty() || dc.selected_scores.front() == 0.0) {
    return fallback();
  }
  SelectionOutcome out;
  out.rule = SelectionRule::kGraseDc;
  for (size_t i = 0; i < dc.selected_ids.size(); ++i) {
    out.selected.push_back({dc.selected_ids[i], dc.selected_scores[i]});
  }
  return out;
}

std::string PromptPlanText(const Exemplar& exemplar) {
  if (!exemplar.plan_text.empty()) return exemplar.plan_text;
  if (exemplar.plan) return ToText(*exemplar.plan);
  std::string out;
  if (exemplar.as) {
    for (size_t i = 0; i < exemplar.as->labels.size(); ++i) {
      if (i > 0) out += '\n';
      out += exemplar.as->labels[i];
    }
  }
  return out;
}

RunResult RunPipeline(const std::vector<TestExample>& tests,
                      const ExemplarPool& pool, PlanGenerator& generator,
                      const Domain* domain, const PipelineConfig& config) {
  config.Check(tests, domain != nullptr);
  if (pool.empty()) throw std::invalid_argument("exemplar pool is empty");
  if (config.mode != SelectionMode::kRandom &&
      config.mode != SelectionMode::kTaskSim) {
    pool.RequireRepr(config.repr);
  }

  // per_test[t][iteration]
  std::vector<std::vector<RunRecord>> per_test(tests.size());
  auto run_test = [&](size_t t) {
    const TestExample& test = tests[t];
    const std::optional<Problem> problem = TryParseProblem(test, domain);
    std::vector<RunRecord>& out = per_test[t];
    for (size_t it = 0; it < config.iterations; ++it) {
      if (config.val_gated && it > 0 && out.back().solved()) {
        RunRecord carried = out.back();
        carried.iteration = it;
        carried.frozen = true;
        carried.wall_time_ms = 0.0;
        carried.timestamp = UtcTimestamp();
        out.push_back(std::move(carried));
        continue;
      }
      const auto start = std::chrono::steady_clock::now();
      RunRecord rec;
      rec.test_id = test.id;
      rec.iteration = it;
      rec.timestamp = UtcTimestamp();
      const Plan* previous = it > 0 ? &out.back().plan : nullptr;
      const SelectionOutcome sel =
          SelectForIteration(test, previous, it, pool, domain, config);
      rec.rule = sel.rule;
      rec.selected = sel.selected;

      std::vector<PromptExemplar> blocks;
      for (const SelectedExemplar& s : sel.selected) {
        const Exemplar& e = pool.at(*pool.FindIndex(s.id));
        blocks.push_back({e.task_text, PromptPlanText(e)});
      }
      const std::string prompt = AssemblePrompt(blocks, test.task_text);
      rec.prompt_digest = Sha256Digest(prompt);
      bool generated = false;
      try {
        rec.response = generator.Generate(prompt, config.max_output_tokens);
        generated = true;
      } catch (const std::exception& e) {
        rec.error = e.what();
        Log(LogLevel::kWarning, "test '" + test.id + "' iteration " +
                                    std::to_string(it) + ": " + rec.error);
      }
      if (generated) {
        rec.plan = ParsePlanTolerant(rec.response, domain);
        if (problem) {
          rec.validation = ToRecordValidation(Validate(*domain, *problem, rec.plan));
        }
      }
      rec.wall_time_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();
      Log(LogLevel::kDebug, "test '" + test.id + "' iteration " +
                                std::to_string(it) + " prompt " +
                                rec.prompt_digest + " response " +
                                Sha256Digest(rec.response));
      out.push_back(std::move(rec));
    }
  };

  const size_t width = std::min(config.concurrency, std::max<size_t>(1, tests.size()));
  if (width <= 1) {
    for (size_t t = 0; t < tests.size(); ++t) run_test(t);
  } else {
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    for (size_t w = 0; w < width; ++w) {
      workers.emplace_back([&] {
        for (size_t t = next++; t < tests.size(); t = next++) {
          try {
            run_test(t);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (std::thread& w : workers) w.join();
    if (error) std::rethrow_exception(error);
  }

  RunResult result;
  for (size_t it = 0; it < config.iterations; ++it) {
    IterationSummary s;
    s.iteration = it;
    s.tests = tests.size();
    bool any_validation = false;
    size_t exemplars = 0;
    for (size_t t = 0; t < tests.size(); ++t) {
      RunRecord& rec = per_test[t][it];
      any_validation = any_validation || rec.validation.has_value();
      if (rec.solved()) ++s.solved;
      if (!rec.error.empty()) ++s.errors;
      if (rec.rule == SelectionRule::kRandomFallback && !rec.frozen) ++s.fallbacks;
      exemplars += rec.selected.size();
      result.records.push_back(std::move(rec));
    }
    if (any_validation && !tests.empty()) {
      s.accuracy = static_cast<double>(s.solved) / static_cast<double>(tests.size());
    }
    if (!tests.empty()) {
      s.mean_exemplars = static_cast<double>(exemplars) / static_cast<double>(tests.size());
    }
    result.summaries.push_back(s);
  }
  return result;
}

double Evaluate(const std::vector<RunRecord>& records,
                const std::vector<std::string>& test_ids, size_t iteration) {
  if (test_ids.empty()) return 0.0;
  std::map<std::string, const RunRecord*> at;
  for (const RunRecord& r : records) {
    if (r.iteration == iteration) at[r.test_id] = &r;
  }
  size_t solved = 0;
  for (const std::string& id : test_ids) {
    auto it = at.find(id);
    if (it == at.end()) {
      throw MissingRecordError("no record for test '" + id + "' at iteration " +
                               std::to_string(iteration));
    }
    if (it->second->solved()) ++solved;
  }
  return static_cast<double>(solved) / static_cast<double>(test_ids.size());
}

}  // namespace plansel
