#include "plansel/plan_repr.h"

#include <stdexcept>

namespace plansel {

std::string_view ToString(ReprKind kind) {
  switch (kind) {
    case ReprKind::kAs:
      return "as";
    case ReprKind::kOas:
      return "oas";
    case ReprKind::kEs:
      return "es";
    case ReprKind::kOes:
      return "oes";
  }
  return "as";
}

ReprKind ParseReprKind(std::string_view text) {
  const std::string lower = ToLower(text);
  if (lower == "as") return ReprKind::kAs;
  if (lower == "oas") return ReprKind::kOas;
  if (lower == "es") return ReprKind::kEs;
  if (lower == "oes") return ReprKind::kOes;
  throw std::invalid_argument("unknown representation '" + std::string(text) +
                              "' (expected as, oas, es or oes)");
}

std::string PositionLabel(std::string_view name, size_t position,
                          size_t arity) {
  if (arity == 1) return std::string(name);
  return std::string(name) + "_" + std::to_string(position);
}

ActionSequence ToAs(const Plan& plan) {
  ActionSequence seq;
  seq.labels.reserve(plan.steps.size());
  for (const GroundAction& step : plan.steps) {
    seq.labels.push_back(step.schema_name);
  }
  return seq;
}

ObjectCentricSequences ToOas(const Plan& plan) {
  ObjectCentricSequences out;
  for (const GroundAction& step : plan.steps) {
    const size_t arity = step.arguments.size();
    for (size_t i = 0; i < arity; ++i) {
      out.per_object[step.arguments[i]].labels.push_back(
          PositionLabel(step.schema_name, i, arity));
    }
  }
  return out;
}

ActionSequence EsFromTrace(const std::vector<StateEvent>& trace) {
  ActionSequence seq;
  seq.labels.reserve(trace.size());
  for (const StateEvent& event : trace) {
    seq.labels.push_back(std::string(ToString(event.kind)) + ":" +
                         event.atom.predicate);
  }
  return seq;
}

ObjectCentricSequences OesFromTrace(const std::vector<StateEvent>& trace) {
  ObjectCentricSequences out;
  for (const StateEvent& event : trace) {
    const size_t arity = event.atom.args.size();
    const std::string name =
        std::string(ToString(event.kind)) + ":" + event.atom.predicate;
    for (size_t i = 0; i < arity; ++i) {
      out.per_object[event.atom.args[i]].labels.push_back(
          PositionLabel(name, i, arity));
    }
  }
  return out;
}

ActionSequence ToEs(const Domain& domain, const Problem& problem,
                    const Plan& plan) {
  return EsFromTrace(ExecutionTrace(domain, problem, plan));
}

ObjectCentricSequences ToOes(const Domain& domain, const Problem& problem,
                             const Plan& plan) {
  return OesFromTrace(ExecutionTrace(domain, problem, plan));
}

}  // namespace plansel
