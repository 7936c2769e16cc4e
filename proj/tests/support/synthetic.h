// Synthetic blocksworld workload with a planted near-duplicate per test.
//
// Each test is a random walk of at least `min_length` actions that ends with
// a stack; its goal is the set of `on` atoms of the final state, so the walk
// solves it and the walk without its last step does not. The pool holds, per
// test, one candidate with the same walk on renamed blocks (identical action
// sequence) plus short random-walk distractors. The walk is simulated here,
// independently of the library's executor.
#ifndef PLANSEL_TESTS_SYNTHETIC_H_
#define PLANSEL_TESTS_SYNTHETIC_H_

#include <algorithm>
#include <cctype>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "plansel/pipeline.h"
#include "plansel/pool.h"

namespace plansel::testing {

struct BlocksWalk {
  std::string problem_text;
  std::string plan_text;
  Plan plan;
};

class BlocksSim {
 public:
  BlocksSim(size_t blocks, const std::string& prefix, std::mt19937_64& rng) {
    for (size_t i = 1; i <= blocks; ++i) names_.push_back(prefix + std::to_string(i));
    std::vector<std::string> order = names_;
    std::shuffle(order.begin(), order.end(), rng);
    // Random towers: each block starts a new tower or goes on the previous one.
    for (size_t i = 0; i < order.size(); ++i) {
      if (i == 0 || rng() % 2 == 0) {
        on_[order[i]] = "";
      } else {
        on_[order[i]] = order[i - 1];
      }
    }
    init_ = Atoms();
  }

  // Applicable actions, excluding the inverse of `last` when others exist.
  std::vector<GroundAction> Options(const GroundAction* last) const {
    std::vector<GroundAction> out;
    if (holding_.empty()) {
      for (const std::string& x : names_) {
        if (!Clear(x)) continue;
        if (on_.at(x).empty()) {
          out.push_back({"pick-up", {x}});
        } else {
          out.push_back({"unstack", {x, on_.at(x)}});
        }
      }
    } else {
      out.push_back({"put-down", {holding_}});
      for (const std::string& y : names_) {
        if (y != holding_ && Clear(y)) out.push_back({"stack", {holding_, y}});
      }
    }
    if (last == nullptr) return out;
    std::vector<GroundAction> forward = out;
    std::erase_if(forward, [&](const GroundAction& a) { return IsInverse(*last, a); });
    // A single tower leaves only the inverse move.
    return forward.empty() ? out : forward;
  }

  void Step(const GroundAction& a) {
    const std::string& x = a.arguments[0];
    if (a.schema_name == "pick-up" || a.schema_name == "unstack") {
      on_.erase(x);
      holding_ = x;
    } else {
      on_[x] = a.schema_name == "stack" ? a.arguments[1] : "";
      holding_.clear();
    }
  }

  std::set<std::string> Atoms() const {
    std::set<std::string> out;
    if (holding_.empty()) {
      out.insert("(handempty)");
    } else {
      out.insert("(holding " + holding_ + ")");
    }
    for (const std::string& x : names_) {
      if (x == holding_) continue;
      const std::string& below = on_.at(x);
      out.insert(below.empty() ? "(ontable " + x + ")" : "(on " + x + " " + below + ")");
      if (Clear(x)) out.insert("(clear " + x + ")");
    }
    return out;
  }

  std::string ProblemText(const std::string& name) const {
    std::ostringstream os;
    os << "(define (problem " << name << ")\n(:domain blocksworld-4ops)\n(:objects";
    for (const std::string& n : names_) os << ' ' << n;
    os << ")\n(:init\n";
    for (const std::string& a : init_) os << a << '\n';
    os << ")\n(:goal (and\n";
    for (const std::string& a : Atoms()) {
      if (a.rfind("(on ", 0) == 0) os << a << '\n';
    }
    os << "))\n)\n";
    return os.str();
  }

 private:
  bool Clear(const std::string& x) const {
    if (x == holding_) return false;
    for (const auto& [upper, lower] : on_) {
      if (lower == x) return false;
    }
    return true;
  }

  static bool IsInverse(const GroundAction& a, const GroundAction& b) {
    const auto pair = [&](const char* x, const char* y) {
      return (a.schema_name == x && b.schema_name == y) || (a.schema_name == y && b.schema_name == x);
    };
    return (pair("pick-up", "put-down") || pair("unstack", "stack")) && a.arguments == b.arguments;
  }

  std::vector<std::string> names_;
  std::map<std::string, std::string> on_;  // block -> block below, "" for table
  std::string holding_;
  std::set<std::string> init_;
};

inline std::string PlanText(const Plan& plan) {
  std::string out;
  for (const GroundAction& a : plan.steps) {
    out += "(" + a.schema_name;
    for (const std::string& arg : a.arguments) out += " " + arg;
    out += ")\n";
  }
  return out;
}

// Walk of at least `min_length` steps (at most `max_length`) ending with a
// stack when `end_with_stack` is set.
inline BlocksWalk RandomWalk(size_t blocks, const std::string& prefix, const std::string& name,
                             size_t min_length, size_t max_length, bool end_with_stack,
                             std::mt19937_64& rng) {
  for (;;) {
    BlocksSim sim(blocks, prefix, rng);
    BlocksWalk w;
    while (w.plan.size() < max_length) {
      const GroundAction* last = w.plan.empty() ? nullptr : &w.plan.steps.back();
      const std::vector<GroundAction> options = sim.Options(last);
      const GroundAction a = options[rng() % options.size()];
      sim.Step(a);
      w.plan.steps.push_back(a);
      if (w.plan.size() >= min_length && (!end_with_stack || a.schema_name == "stack")) {
        w.problem_text = sim.ProblemText(name);
        w.plan_text = PlanText(w.plan);
        return w;
      }
    }
  }
}

inline Plan Rename(const Plan& plan, const std::string& from, const std::string& to) {
  Plan out = plan;
  for (GroundAction& a : out.steps) {
    for (std::string& arg : a.arguments) arg = to + arg.substr(from.size());
  }
  return out;
}

struct SyntheticWorkload {
  std::vector<TestExample> tests;
  std::vector<Exemplar> candidates;
  std::map<std::string, Plan> references;  // task text -> reference plan
};

// `tests` tests, one planted candidate each and `distractors` short walks.
inline SyntheticWorkload MakeSyntheticWorkload(size_t tests, size_t distractors, uint64_t seed) {
  std::mt19937_64 rng(seed);
  SyntheticWorkload w;
  for (size_t i = 0; i < tests; ++i) {
    const size_t blocks = 5 + rng() % 3;
    const std::string id = "test-" + std::to_string(i);
    const BlocksWalk walk = RandomWalk(blocks, "b", id, 12, 24, true, rng);
    w.tests.push_back({id, walk.problem_text, walk.plan});
    w.references[walk.problem_text] = walk.plan;

    Exemplar planted;
    planted.id = "planted-" + std::to_string(i);
    planted.plan = Rename(walk.plan, "b", "c");
    planted.plan_text = PlanText(*planted.plan);
    // The renamed task: same structure, renamed blocks.
    std::string task = walk.problem_text;
    for (size_t pos = 0; (pos = task.find(" b", pos)) != std::string::npos; ++pos) {
      if (pos + 2 < task.size() && std::isdigit(static_cast<unsigned char>(task[pos + 2]))) task[pos + 1] = 'c';
    }
    planted.task_text = task;
    w.candidates.push_back(std::move(planted));
  }
  for (size_t i = 0; i < distractors; ++i) {
    const size_t length = 2 + rng() % 3;
    const std::string id = "distractor-" + std::to_string(i);
    const BlocksWalk walk = RandomWalk(4 + rng() % 3, "d", id, length, length, false, rng);
    Exemplar e;
    e.id = id;
    e.task_text = walk.problem_text;
    e.plan = walk.plan;
    e.plan_text = walk.plan_text;
    w.candidates.push_back(std::move(e));
  }
  return w;
}

}  // namespace plansel::testing

#endif  // PLANSEL_TESTS_SYNTHETIC_H_
