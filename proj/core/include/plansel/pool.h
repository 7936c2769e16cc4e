// Exemplar candidates with cached plan representations.

#ifndef PLANSEL_POOL_H_
#define PLANSEL_POOL_H_

#include <array>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "plansel/pddl.h"
#include "plansel/plan_repr.h"
#include "plansel/similarity.h"

namespace plansel {

class ReprMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Exemplar {
  std::string id;
  std::string task_text;
  std::string plan_text;
  std::optional<Plan> plan;
  std::optional<ActionSequence> as;
  std::optional<ObjectCentricSequences> oas;
  std::optional<ActionSequence> es;
  std::optional<ObjectCentricSequences> oes;
  // Raw JSON object text, carried through untouched.
  std::string meta_json;

  bool Has(ReprKind kind) const;
};

// Fills as/oas from the plan, and es/oes as well when a domain is given and
// the task text parses as a problem on which the plan executes. Existing
// values are kept.
void DeriveRepresentations(Exemplar* exemplar, const Domain* domain);

// Immutable once constructed; safe to share across threads.
class ExemplarPool {
 public:
  ExemplarPool() = default;
  // Throws std::invalid_argument on duplicate ids.
  explicit ExemplarPool(std::vector<Exemplar> exemplars);

  size_t size() const { return exemplars_.size(); }
  bool empty() const { return exemplars_.empty(); }
  const Exemplar& at(size_t index) const { return exemplars_.at(index); }
  const std::vector<Exemplar>& exemplars() const { return exemplars_; }
  std::optional<size_t> FindIndex(const std::string& id) const;

  bool Has(size_t index, ReprKind kind) const {
    return exemplars_[index].Has(kind);
  }

  const LabelInterner& interner(ReprKind kind) const {
    return caches_[Slot(kind)].interner;
  }
  // Flat kinds (AS, ES).
  const InternedSequence& Sequence(ReprKind kind, size_t index) const;
  // Object-centric kinds (OAS, OES); sorted by object name.
  const std::vector<InternedSequence>& Objects(ReprKind kind,
                                               size_t index) const;
  const std::vector<InternedSequence>& AllSequences(ReprKind kind) const {
    return caches_[Slot(kind)].flat;
  }
  const std::set<std::string>& TaskTokenSet(size_t index) const {
    return task_tokens_[index];
  }

  // Throws ReprMismatchError naming the first candidate without the
  // representation.
  void RequireRepr(ReprKind kind) const;

 private:
  struct Cache {
    LabelInterner interner;
    std::vector<InternedSequence> flat;
    std::vector<std::vector<InternedSequence>> objects;
  };
  static size_t Slot(ReprKind kind) { return static_cast<size_t>(kind); }

  std::vector<Exemplar> exemplars_;
  std::unordered_map<std::string, size_t> index_;
  std::array<Cache, 4> caches_;
  std::vector<std::set<std::string>> task_tokens_;
};

}  // namespace plansel

#endif  // PLANSEL_POOL_H_
