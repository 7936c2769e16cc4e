// STRIPS-subset PDDL: domains, problems, plans, and plan validation.
//
// Accepted subset:
//   - :strips and :typing requirements (other requirement flags are accepted
//     only if they do not change the semantics we implement);
//   - conjunctive preconditions and goals of positive or negated atoms;
//   - add/delete effects.
// Quantifiers, disjunction, conditional effects, numeric fluents, derived
// predicates and durative actions raise UnsupportedConstructError.
//
// All identifiers are lowercased on input.

#ifndef PLANSEL_PDDL_H_
#define PLANSEL_PDDL_H_

#include <compare>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "plansel/sexpr.h"

namespace plansel {

class PddlError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedConstructError : public PddlError {
 public:
  explicit UnsupportedConstructError(const std::string& construct);

  const std::string& construct() const { return construct_; }

 private:
  std::string construct_;
};

/// A predicate applied to terms. Terms are either variables (leading '?') or
/// constants.
struct Atom {
  std::string predicate;
  std::vector<std::string> args;

  auto operator<=>(const Atom&) const = default;
  bool operator==(const Atom&) const = default;
};

struct Literal {
  Atom atom;
  bool negated = false;

  auto operator<=>(const Literal&) const = default;
  bool operator==(const Literal&) const = default;
};

std::string ToString(const Atom& atom);
std::string ToString(const Literal& literal);
std::ostream& operator<<(std::ostream& os, const Atom& atom);
std::ostream& operator<<(std::ostream& os, const Literal& literal);

struct TypedName {
  std::string name;
  std::string type = "object";

  bool operator==(const TypedName&) const = default;
};

struct PredicateDecl {
  std::string name;
  std::vector<TypedName> params;

  size_t arity() const { return params.size(); }
  bool operator==(const PredicateDecl&) const = default;
};

struct ActionSchema {
  std::string name;
  std::vector<TypedName> parameters;
  std::vector<Literal> preconditions;
  // Effects keep declaration order; execution traces depend on it.
  std::vector<Atom> add_list;
  std::vector<Atom> delete_list;

  bool operator==(const ActionSchema&) const = default;
};

class Domain {
 public:
  std::string name;
  std::vector<std::string> requirements;
  // type -> parent type; "object" is the implicit root.
  std::map<std::string, std::string> types;
  std::vector<TypedName> constants;
  std::vector<PredicateDecl> predicates;
  std::vector<ActionSchema> action_schemas;

  const ActionSchema* FindSchema(std::string_view schema_name) const;
  const PredicateDecl* FindPredicate(std::string_view predicate) const;
  const TypedName* FindConstant(std::string_view constant) const;
  bool IsSubtype(std::string_view type, std::string_view ancestor) const;

  // Checks the structural invariants; throws PddlError on violation.
  void Check() const;

  bool operator==(const Domain&) const = default;
};

class Problem {
 public:
  std::string name;
  std::string domain_name;
  std::vector<TypedName> objects;
  std::set<Atom> init;
  std::vector<Literal> goal;

  const TypedName* FindObject(std::string_view object) const;

  bool operator==(const Problem&) const = default;
};

struct GroundAction {
  std::string schema_name;
  std::vector<std::string> arguments;

  bool operator==(const GroundAction&) const = default;
};

std::string ToString(const GroundAction& action);

struct Plan {
  std::vector<GroundAction> steps;

  size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
  bool operator==(const Plan&) const = default;
};

struct State {
  std::set<Atom> atoms;

  bool Holds(const Atom& atom) const { return atoms.count(atom) > 0; }
  bool Satisfies(const Literal& literal) const {
    return Holds(literal.atom) != literal.negated;
  }
  bool operator==(const State&) const = default;
};

enum class FailureReason {
  kUnknownAction,
  kArityMismatch,
  kUnknownObject,
  kTypeMismatch,
  kPreconditionUnsatisfied,
};

std::string_view ToString(FailureReason reason);

class PreconditionError : public PddlError {
 public:
  explicit PreconditionError(Literal literal);

  const Literal& literal() const { return literal_; }

 private:
  Literal literal_;
};

struct StepFailure {
  FailureReason reason;
  std::string detail;
  // Set only for kPreconditionUnsatisfied; grounded.
  std::optional<Literal> literal;
};

struct ValidationReport {
  bool executable = true;
  std::optional<size_t> failure_index;
  std::optional<StepFailure> failure;
  bool goal_satisfied = false;
  // Goal literals that do not hold in final_state.
  std::vector<Literal> unsatisfied_goals;
  State final_state;
};

enum class EventKind { kDelete, kAdd };

struct StateEvent {
  EventKind kind;
  Atom atom;
  size_t step = 0;

  bool operator==(const StateEvent&) const = default;
};

std::string_view ToString(EventKind kind);

Domain ParseDomain(std::string_view text);

// Checks objects only. Use the overload with a domain to also check predicate
// declarations and arities.
Problem ParseProblem(std::string_view text);
Problem ParseProblem(std::string_view text, const Domain& domain);

// Throws PddlError if the problem uses undeclared predicates, wrong arities,
// or unknown constants.
void CheckProblem(const Domain& domain, const Problem& problem);

// Strict mode: the text must consist solely of parenthesized actions (and
// ';' comments).
Plan ParsePlan(std::string_view text);

// Tolerant mode: extracts every "(name arg*)" group from arbitrary text, in
// order. ';' still starts a comment. With a domain, groups whose head is not a
// schema name are dropped. Never throws.
Plan ParsePlanTolerant(std::string_view text, const Domain* domain = nullptr);

std::string ToPddl(const Domain& domain);
std::string ToPddl(const Problem& problem);
std::string ToText(const Plan& plan);

State InitialState(const Problem& problem);

struct GroundEffects {
  std::vector<Literal> preconditions;
  std::vector<Atom> add_list;
  std::vector<Atom> delete_list;
};

// Substitutes arguments for parameters. Throws PddlError on unknown schema or
// arity mismatch.
GroundEffects Ground(const Domain& domain, const GroundAction& action);

// Applies an action. Throws PreconditionError naming the first failing literal
// in declaration order.
State Apply(const Domain& domain, const State& state,
            const GroundAction& action);

ValidationReport Validate(const Domain& domain, const Problem& problem,
                          const Plan& plan);

// Per step: grounded delete events, then add events, in schema declaration
// order. Throws PddlError if the plan is not executable.
std::vector<StateEvent> ExecutionTrace(const Domain& domain,
                                       const Problem& problem,
                                       const Plan& plan);

// Trace of the longest executable prefix; never throws for validation
// failures.
std::vector<StateEvent> ExecutablePrefixTrace(const Domain& domain,
                                              const Problem& problem,
                                              const Plan& plan);

}  // namespace plansel

#endif  // PLANSEL_PDDL_H_
