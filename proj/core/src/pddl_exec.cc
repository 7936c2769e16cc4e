// Grounding, state transitions and plan validation.

#include <algorithm>
#include <unordered_map>

#include "plansel/pddl.h"

namespace plansel {

namespace {

Atom Substitute(const Atom& atom,
                const std::unordered_map<std::string, std::string>& binding) {
  Atom out;
  out.predicate = atom.predicate;
  out.args.reserve(atom.args.size());
  for (const std::string& term : atom.args) {
    auto it = binding.find(term);
    out.args.push_back(it == binding.end() ? term : it->second);
  }
  return out;
}

// Checks schema, arity, objects and parameter types for one step.
std::optional<StepFailure> CheckStep(const Domain& domain,
                                     const Problem& problem,
                                     const GroundAction& action) {
  const ActionSchema* schema = domain.FindSchema(action.schema_name);
  if (schema == nullptr) {
    return StepFailure{FailureReason::kUnknownAction,
                       "unknown action '" + action.schema_name + "'",
                       std::nullopt};
  }
  if (schema->parameters.size() != action.arguments.size()) {
    return StepFailure{FailureReason::kArityMismatch,
                       "'" + schema->name + "' expects " +
                           std::to_string(schema->parameters.size()) +
                           " arguments, got " +
                           std::to_string(action.arguments.size()),
                       std::nullopt};
  }
  for (size_t i = 0; i < action.arguments.size(); ++i) {
    const std::string& arg = action.arguments[i];
    const TypedName* object = problem.FindObject(arg);
    if (object == nullptr) object = domain.FindConstant(arg);
    if (object == nullptr) {
      return StepFailure{FailureReason::kUnknownObject,
                         "unknown object '" + arg + "'", std::nullopt};
    }
    const std::string& expected = schema->parameters[i].type;
    if (!domain.IsSubtype(object->type, expected)) {
      return StepFailure{FailureReason::kTypeMismatch,
                         "object '" + arg + "' of type '" + object->type +
                             "' used as '" + expected + "'",
                         std::nullopt};
    }
  }
  return std::nullopt;
}

State ApplyGrounded(const State& state, const GroundEffects& effects) {
  State next = state;
  for (const Atom& atom : effects.delete_list) next.atoms.erase(atom);
  for (const Atom& atom : effects.add_list) next.atoms.insert(atom);
  return next;
}

const Literal* FirstUnsatisfied(const State& state,
                                const std::vector<Literal>& literals) {
  for (const Literal& literal : literals) {
    if (!state.Satisfies(literal)) return &literal;
  }
  return nullptr;
}

void AppendEvents(const GroundEffects& effects, size_t step,
                  std::vector<StateEvent>* trace) {
  for (const Atom& atom : effects.delete_list) {
    trace->push_back({EventKind::kDelete, atom, step});
  }
  for (const Atom& atom : effects.add_list) {
    trace->push_back({EventKind::kAdd, atom, step});
  }
}

}  // namespace

std::string_view ToString(FailureReason reason) {
  switch (reason) {
    case FailureReason::kUnknownAction:
      return "unknown-action";
    case FailureReason::kArityMismatch:
      return "arity-mismatch";
    case FailureReason::kUnknownObject:
      return "unknown-object";
    case FailureReason::kTypeMismatch:
      return "type-mismatch";
    case FailureReason::kPreconditionUnsatisfied:
      return "precondition-unsatisfied";
  }
  return "unknown";
}

std::string_view ToString(EventKind kind) {
  return kind == EventKind::kAdd ? "add" : "delete";
}

PreconditionError::PreconditionError(Literal literal)
    : PddlError("precondition unsatisfied: " + ToString(literal)),
      literal_(std::move(literal)) {}

State InitialState(const Problem& problem) { return State{problem.init}; }

GroundEffects Ground(const Domain& domain, const GroundAction& action) {
  const ActionSchema* schema = domain.FindSchema(action.schema_name);
  if (schema == nullptr) {
    throw PddlError("unknown action '" + action.schema_name + "'");
  }
  if (schema->parameters.size() != action.arguments.size()) {
    throw PddlError("'" + schema->name + "' expects " +
                    std::to_string(schema->parameters.size()) +
                    " arguments, got " +
                    std::to_string(action.arguments.size()));
  }
  std::unordered_map<std::string, std::string> binding;
  for (size_t i = 0; i < action.arguments.size(); ++i) {
    binding[schema->parameters[i].name] = action.arguments[i];
  }
  GroundEffects effects;
  for (const Literal& literal : schema->preconditions) {
    effects.preconditions.push_back(
        {Substitute(literal.atom, binding), literal.negated});
  }
  for (const Atom& atom : schema->add_list) {
    effects.add_list.push_back(Substitute(atom, binding));
  }
  for (const Atom& atom : schema->delete_list) {
    effects.delete_list.push_back(Substitute(atom, binding));
  }
  return effects;
}

State Apply(const Domain& domain, const State& state,
            const GroundAction& action) {
  const GroundEffects effects = Ground(domain, action);
  if (const Literal* failed = FirstUnsatisfied(state, effects.preconditions)) {
    throw PreconditionError(*failed);
  }
  return ApplyGrounded(state, effects);
}

namespace {

// Shared by Validate and the trace builders.
ValidationReport Execute(const Domain& domain, const Problem& problem,
                         const Plan& plan, std::vector<StateEvent>* trace) {
  ValidationReport report;
  State state = InitialState(problem);
  for (size_t i = 0; i < plan.steps.size(); ++i) {
    const GroundAction& step = plan.steps[i];
    if (auto failure = CheckStep(domain, problem, step)) {
      report.executable = false;
      report.failure_index = i;
      report.failure = std::move(failure);
      break;
    }
    const GroundEffects effects = Ground(domain, step);
    if (const Literal* failed = FirstUnsatisfied(state, effects.preconditions)) {
      report.executable = false;
      report.failure_index = i;
      report.failure = StepFailure{FailureReason::kPreconditionUnsatisfied,
                                   ToString(step) + ": " + ToString(*failed),
                                   *failed};
      break;
    }
    if (trace != nullptr) AppendEvents(effects, i, trace);
    state = ApplyGrounded(state, effects);
  }
  if (report.executable) {
    for (const Literal& literal : problem.goal) {
      if (!state.Satisfies(literal)) report.unsatisfied_goals.push_back(literal);
    }
    report.goal_satisfied = report.unsatisfied_goals.empty();
  }
  report.final_state = std::move(state);
  return report;
}

}  // namespace

ValidationReport Validate(const Domain& domain, const Problem& problem,
                          const Plan& plan) {
  return Execute(domain, problem, plan, nullptr);
}

std::vector<StateEvent> ExecutionTrace(const Domain& domain,
                                       const Problem& problem,
                                       const Plan& plan) {
  std::vector<StateEvent> trace;
  const ValidationReport report = Execute(domain, problem, plan, &trace);
  if (!report.executable) {
    throw PddlError("plan is not executable at step " +
                    std::to_string(*report.failure_index) + ": " +
                    report.failure->detail);
  }
  return trace;
}

std::vector<StateEvent> ExecutablePrefixTrace(const Domain& domain,
                                              const Problem& problem,
                                              const Plan& plan) {
  std::vector<StateEvent> trace;
  Execute(domain, problem, plan, &trace);
  return trace;
}

}  // namespace plansel
