// Plan representations at four granularities:
//   AS   action names in step order;
//   OAS  per-object action names tagged with the object's argument position;
//   ES   atomic state changes ("delete:on", "add:clear", ...);
//   OES  per-object state changes tagged with argument position.

#ifndef PLANSEL_PLAN_REPR_H_
#define PLANSEL_PLAN_REPR_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "plansel/pddl.h"

namespace plansel {

struct ActionSequence {
  std::vector<std::string> labels;

  size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
  bool operator==(const ActionSequence&) const = default;
};

// Objects never touched by a plan are absent, not mapped to empty sequences.
struct ObjectCentricSequences {
  std::map<std::string, ActionSequence> per_object;

  size_t size() const { return per_object.size(); }
  bool empty() const { return per_object.empty(); }
  bool operator==(const ObjectCentricSequences&) const = default;
};

enum class ReprKind { kAs, kOas, kEs, kOes };

std::string_view ToString(ReprKind kind);
// Accepts "as", "oas", "es", "oes" in any case. Throws std::invalid_argument.
ReprKind ParseReprKind(std::string_view text);
inline bool IsObjectCentric(ReprKind kind) {
  return kind == ReprKind::kOas || kind == ReprKind::kOes;
}
inline bool NeedsExecution(ReprKind kind) {
  return kind == ReprKind::kEs || kind == ReprKind::kOes;
}

ActionSequence ToAs(const Plan& plan);
ObjectCentricSequences ToOas(const Plan& plan);

// Both throw PddlError when the plan is not executable.
ActionSequence ToEs(const Domain& domain, const Problem& problem,
                    const Plan& plan);
ObjectCentricSequences ToOes(const Domain& domain, const Problem& problem,
                             const Plan& plan);

ActionSequence EsFromTrace(const std::vector<StateEvent>& trace);
ObjectCentricSequences OesFromTrace(const std::vector<StateEvent>& trace);

// "<schema>_<position>", or the bare name for single-argument actions.
std::string PositionLabel(std::string_view name, size_t position, size_t arity);

}  // namespace plansel

#endif  // PLANSEL_PLAN_REPR_H_
