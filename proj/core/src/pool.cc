#include "plansel/pool.h"

namespace plansel {

bool Exemplar::Has(ReprKind kind) const {
  switch (kind) {
    case ReprKind::kAs:
      return as.has_value();
    case ReprKind::kOas:
      return oas.has_value();
    case ReprKind::kEs:
      return es.has_value();
    case ReprKind::kOes:
      return oes.has_value();
  }
  return false;
}

void DeriveRepresentations(Exemplar* exemplar, const Domain* domain) {
  if (!exemplar->plan) return;
  const Plan& plan = *exemplar->plan;
  if (!exemplar->as) exemplar->as = ToAs(plan);
  if (!exemplar->oas) exemplar->oas = ToOas(plan);
  if (domain == nullptr || (exemplar->es && exemplar->oes)) return;
  try {
    const Problem problem = ParseProblem(exemplar->task_text, *domain);
    const std::vector<StateEvent> trace =
        ExecutionTrace(*domain, problem, plan);
    if (!exemplar->es) exemplar->es = EsFromTrace(trace);
    if (!exemplar->oes) exemplar->oes = OesFromTrace(trace);
  } catch (const std::exception&) {
    // Not a parseable problem or not executable: execution-based
    // representations stay unavailable for this exemplar.
  }
}

ExemplarPool::ExemplarPool(std::vector<Exemplar> exemplars)
    : exemplars_(std::move(exemplars)) {
  for (size_t i = 0; i < exemplars_.size(); ++i) {
    if (!index_.emplace(exemplars_[i].id, i).second) {
      throw std::invalid_argument("duplicate exemplar id '" +
                                  exemplars_[i].id + "'");
    }
  }
  for (Cache& cache : caches_) {
    cache.flat.resize(exemplars_.size());
    cache.objects.resize(exemplars_.size());
  }
  task_tokens_.reserve(exemplars_.size());
  for (size_t i = 0; i < exemplars_.size(); ++i) {
    const Exemplar& e = exemplars_[i];
    if (e.as) {
      Cache& c = caches_[Slot(ReprKind::kAs)];
      c.flat[i] = c.interner.Encode(*e.as);
    }
    if (e.es) {
      Cache& c = caches_[Slot(ReprKind::kEs)];
      c.flat[i] = c.interner.Encode(*e.es);
    }
    if (e.oas) {
      Cache& c = caches_[Slot(ReprKind::kOas)];
      for (const auto& [object, seq] : e.oas->per_object) {
        c.objects[i].push_back(c.interner.Encode(seq));
      }
    }
    if (e.oes) {
      Cache& c = caches_[Slot(ReprKind::kOes)];
      for (const auto& [object, seq] : e.oes->per_object) {
        c.objects[i].push_back(c.interner.Encode(seq));
      }
    }
    task_tokens_.push_back(TaskTokens(e.task_text));
  }
}

std::optional<size_t> ExemplarPool::FindIndex(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const InternedSequence& ExemplarPool::Sequence(ReprKind kind,
                                               size_t index) const {
  return caches_[Slot(kind)].flat.at(index);
}

const std::vector<InternedSequence>& ExemplarPool::Objects(
    ReprKind kind, size_t index) const {
  return caches_[Slot(kind)].objects.at(index);
}

void ExemplarPool::RequireRepr(ReprKind kind) const {
  for (const Exemplar& e : exemplars_) {
    if (!e.Has(kind)) {
      throw ReprMismatchError("candidate '" + e.id + "' has no " +
                              std::string(ToString(kind)) +
                              " representation");
    }
  }
}

}  // namespace plansel
