// Exemplar selection and plan generation loop.
//
// Per test, iteration 0 draws initial_random_count exemplars (plan-guided
// modes) or applies the mode's own rule (random, task-sim, as-oracle). Later
// iterations of the plan-guided modes rank the pool against the plan
// generated in the previous iteration. Every (test, iteration) yields exactly
// one RunRecord; with val_gated, solved tests are frozen and their record is
// carried forward without another generator call.
#ifndef PLANSEL_PIPELINE_H_
#define PLANSEL_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "plansel/generator.h"
#include "plansel/pddl.h"
#include "plansel/pool.h"
#include "plansel/selection.h"

namespace plansel {

enum class SelectionMode { kRandom, kTaskSim, kAsOracle, kGraseTopN, kGraseDc };

std::string_view ToString(SelectionMode mode);
// Accepts random, task-sim, as-oracle, grase-topn, grase-dc.
SelectionMode ParseSelectionMode(std::string_view text);

struct TestExample {
  std::string id;
  std::string task_text;
  std::optional<Plan> reference;
};

struct PipelineConfig {
  SelectionMode mode = SelectionMode::kGraseDc;
  size_t iterations = 1;
  bool val_gated = false;
  // Exemplars per prompt for every rule except DC.
  size_t exemplar_count = 10;
  DcConfig dc;
  ReprKind repr = ReprKind::kAs;
  uint64_t seed = 0;
  size_t max_output_tokens = 1600;
  size_t initial_random_count = 10;
  // Tests processed at once.
  size_t concurrency = 1;

  // Throws std::invalid_argument on bad values or on a mode the inputs cannot
  // support (as-oracle without references, val_gated without a domain).
  void Check(const std::vector<TestExample>& tests, bool has_domain) const;
};

struct SelectedExemplar {
  std::string id;
  // Absent for random draws.
  std::optional<double> score;
  bool operator==(const SelectedExemplar&) const = default;
};

// How the exemplars of one record were chosen.
enum class SelectionRule {
  kRandom,
  kRandomFallback,
  kTaskSim,
  kAsOracle,
  kGraseTopN,
  kGraseDc,
};
std::string_view ToString(SelectionRule rule);
SelectionRule ParseSelectionRule(std::string_view text);

struct SelectionOutcome {
  SelectionRule rule = SelectionRule::kRandom;
  std::vector<SelectedExemplar> selected;
};

// Deterministic in all arguments. `previous_plan` is the plan generated in
// the previous iteration (ignored at iteration 0 and by modes that do not
// use it).
SelectionOutcome SelectForIteration(const TestExample& test,
                                    const Plan* previous_plan,
                                    size_t iteration, const ExemplarPool& pool,
                                    const Domain* domain,
                                    const PipelineConfig& config);

// Query in the configured representation. ES/OES queries use the trace of
// the plan's longest executable prefix from the test's initial state; they
// are empty when no domain is given or the task is not a problem.
PlanQuery BuildQuery(ReprKind kind, const Plan& plan, const TestExample& test,
                     const Domain* domain);

struct RecordValidation {
  bool executable = false;
  std::optional<size_t> failure_index;
  std::string failure_reason;
  std::string failure_detail;
  std::string failure_literal;
  bool goal_satisfied = false;
  bool operator==(const RecordValidation&) const = default;
};

struct RunRecord {
  std::string test_id;
  size_t iteration = 0;
  SelectionRule rule = SelectionRule::kRandom;
  std::vector<SelectedExemplar> selected;
  std::string prompt_digest;
  std::string response;
  Plan plan;
  // Absent when no domain is configured or the task is not a problem.
  std::optional<RecordValidation> validation;
  // Generator failure; the test counts as unsolved.
  std::string error;
  bool frozen = false;
  // Volatile fields; ignored by replay comparison.
  double wall_time_ms = 0.0;
  std::string timestamp;

  bool solved() const { return validation && validation->goal_satisfied; }
};

struct IterationSummary {
  size_t iteration = 0;
  size_t tests = 0;
  size_t solved = 0;
  // Absent when no record of the iteration carries a validation.
  std::optional<double> accuracy;
  double mean_exemplars = 0.0;
  size_t fallbacks = 0;
  size_t errors = 0;
};

struct RunResult {
  // Ordered by iteration, then by test order.
  std::vector<RunRecord> records;
  std::vector<IterationSummary> summaries;
};

RunResult RunPipeline(const std::vector<TestExample>& tests,
                      const ExemplarPool& pool, PlanGenerator& generator,
                      const Domain* domain, const PipelineConfig& config);

class MissingRecordError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fraction of `test_ids` whose record at `iteration` is goal-satisfying.
// Throws MissingRecordError when a test has no record at that iteration.
double Evaluate(const std::vector<RunRecord>& records,
                const std::vector<std::string>& test_ids, size_t iteration);

// Exemplar plan as written into prompts: the plan text when present,
// otherwise the action labels one per line.
std::string PromptPlanText(const Exemplar& exemplar);

}  // namespace plansel

#endif  // PLANSEL_PIPELINE_H_
