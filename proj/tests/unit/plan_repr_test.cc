#include <random>

#include "doctest.h"
#include "fixtures.h"
#include "plansel/builtin_domains.h"
#include "plansel/plan_repr.h"

using namespace plansel;
using plansel::testing::ReadFixture;

namespace {

using Labels = std::vector<std::string>;

const Domain& Blocks() {
  static const Domain d = LoadDomain("blocksworld-4ops");
  return d;
}

Problem Holding(const std::string& block) {
  return ParseProblem("(define (problem p) (:domain blocksworld-4ops) (:objects " +
                          block + ") (:init (holding " + block + ")) (:goal (and)))",
                      Blocks());
}

}  // namespace

TEST_CASE("AS drops arguments") {
  const Plan p = ParsePlan("(unstack b1 b6)(put-down b1)(unstack b3 b4)(put-down b3)");
  CHECK(ToAs(p).labels == Labels{"unstack", "put-down", "unstack", "put-down"});
  CHECK(ToAs(Plan{}).empty());
  CHECK(ToAs(ParsePlan("(move p3 p2)")).labels == Labels{"move"});
}

TEST_CASE("OAS positions") {
  const auto oas = ToOas(ParsePlan("(unstack b1 b6)(put-down b1)"));
  CHECK(oas.per_object.size() == 2);
  CHECK(oas.per_object.at("b1").labels == Labels{"unstack_0", "put-down"});
  CHECK(oas.per_object.at("b6").labels == Labels{"unstack_1"});
  CHECK(ToOas(Plan{}).empty());
  const auto stacks = ToOas(ParsePlan("(stack b2 b3)(stack b2 b4)"));
  CHECK(stacks.per_object.at("b2").labels == Labels{"stack_0", "stack_0"});
  CHECK(stacks.per_object.at("b3").labels == Labels{"stack_1"});
  CHECK(stacks.per_object.at("b4").labels == Labels{"stack_1"});
}

TEST_CASE("ES labels") {
  const Problem p = Holding("b1");
  CHECK(ToEs(Blocks(), p, ParsePlan("(put-down b1)")).labels ==
        Labels{"delete:holding", "add:ontable", "add:clear", "add:handempty"});
  CHECK(ToEs(Blocks(), p, Plan{}).empty());
  const Problem bw4 = ParseProblem(ReadFixture("bw-rand-4.pddl"), Blocks());
  const Labels es = ToEs(Blocks(), bw4, ParsePlan("(unstack b4 b1)")).labels;
  CHECK(es == Labels{"delete:on", "delete:clear", "delete:handempty",
                     "add:holding", "add:clear"});
}

TEST_CASE("OES labels route by argument position") {
  const Problem p = ParseProblem(
      "(define (problem p) (:domain blocksworld-4ops) (:objects b1 b6)"
      "(:init (on b1 b6) (clear b1) (ontable b6) (handempty)) (:goal (and)))",
      Blocks());
  const auto oes = ToOes(Blocks(), p, ParsePlan("(unstack b1 b6)"));
  CHECK(oes.per_object.at("b1").labels ==
        Labels{"delete:on_0", "delete:clear", "add:holding"});
  CHECK(oes.per_object.at("b6").labels == Labels{"delete:on_1", "add:clear"});
  CHECK(oes.size() == 2);
  CHECK(ToOes(Blocks(), p, Plan{}).empty());
}

TEST_CASE("zero-arity atoms reach ES but no object in OES") {
  const Problem p = Holding("b1");
  const auto oes = ToOes(Blocks(), p, ParsePlan("(put-down b1)"));
  REQUIRE(oes.size() == 1);
  for (const auto& label : oes.per_object.at("b1").labels) {
    CHECK(label.find("handempty") == std::string::npos);
  }
}

TEST_CASE("non-executable plans propagate errors for ES and OES") {
  const Problem p = Holding("b1");
  CHECK_THROWS_AS(ToEs(Blocks(), p, ParsePlan("(pick-up b1)")), PddlError);
  CHECK_THROWS_AS(ToOes(Blocks(), p, ParsePlan("(pick-up b1)")), PddlError);
}

TEST_CASE("length invariants on random valid plans") {
  std::mt19937 rng(3);
  const Problem p = ParseProblem(ReadFixture("bw-rand-6-original.pddl"), Blocks());
  const std::vector<std::string> objs = {"b1", "b2", "b3", "b4", "b5", "b6"};
  for (int trial = 0; trial < 50; ++trial) {
    Plan plan;
    State s = InitialState(p);
    for (int i = 0; i < 400 && plan.size() < 15; ++i) {
      const auto& schema = Blocks().action_schemas[rng() % 4];
      GroundAction act{schema.name, {}};
      for (size_t k = 0; k < schema.parameters.size(); ++k) act.arguments.push_back(objs[rng() % 6]);
      try {
        s = Apply(Blocks(), s, act);
        plan.steps.push_back(act);
      } catch (const PreconditionError&) {
      }
    }
    CHECK(ToAs(plan).size() == plan.size());
    size_t arity = 0;
    for (const auto& st : plan.steps) arity += st.arguments.size();
    size_t oas_total = 0;
    for (const auto& [obj, seq] : ToOas(plan).per_object) oas_total += seq.size();
    CHECK(oas_total == arity);
    CHECK(ToEs(Blocks(), p, plan).size() == ExecutionTrace(Blocks(), p, plan).size());
  }
}

TEST_CASE("repr kind names") {
  for (ReprKind k : {ReprKind::kAs, ReprKind::kOas, ReprKind::kEs, ReprKind::kOes}) {
    CHECK(ParseReprKind(ToString(k)) == k);
  }
  CHECK(ParseReprKind("OAS") == ReprKind::kOas);
  CHECK_THROWS(ParseReprKind("xyz"));
}
