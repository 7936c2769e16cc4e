#include "plansel/similarity.h"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "plansel/parallel.h"

namespace plansel {

LabelId LabelInterner::Intern(const std::string& label) {
  auto [it, inserted] =
      ids_.try_emplace(label, static_cast<LabelId>(labels_.size()));
  if (inserted) labels_.push_back(label);
  return it->second;
}

std::optional<LabelId> LabelInterner::Find(const std::string& label) const {
  auto it = ids_.find(label);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

InternedSequence LabelInterner::Encode(const ActionSequence& seq) {
  InternedSequence out;
  out.reserve(seq.size());
  for (const std::string& label : seq.labels) out.push_back(Intern(label));
  return out;
}

InternedSequence LabelInterner::EncodeQuery(const ActionSequence& seq) const {
  InternedSequence out;
  out.reserve(seq.size());
  for (const std::string& label : seq.labels) {
    out.push_back(Find(label).value_or(kUnknownLabel));
  }
  return out;
}

LcasSpan LcasLocate(std::span<const LabelId> a, std::span<const LabelId> b) {
  LcasSpan best;
  if (a.empty() || b.empty()) return best;
  size_t best_end = 0;  // index in a of the last label of the best run
  if (b.size() <= a.size()) {
    std::vector<uint32_t> row(b.size() + 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
      for (size_t j = b.size(); j-- > 0;) {
        if (a[i] == b[j]) {
          const uint32_t run = row[j] + 1;
          row[j + 1] = run;
          if (run > best.length) {
            best.length = run;
            best_end = i;
          }
        } else {
          row[j + 1] = 0;
        }
      }
    }
  } else {
    std::vector<uint32_t> row(a.size() + 1, 0);
    for (size_t j = 0; j < b.size(); ++j) {
      for (size_t i = a.size(); i-- > 0;) {
        if (a[i] == b[j]) {
          const uint32_t run = row[i] + 1;
          row[i + 1] = run;
          if (run > best.length || (run == best.length && i < best_end)) {
            best.length = run;
            best_end = i;
          }
        } else {
          row[i + 1] = 0;
        }
      }
    }
  }
  best.start_in_a = best_end + 1 - best.length;
  return best;
}

size_t LcasLength(std::span<const LabelId> a, std::span<const LabelId> b) {
  if (a.size() < b.size()) std::swap(a, b);
  if (b.empty()) return 0;
  std::vector<uint32_t> row(b.size() + 1, 0);
  uint32_t best = 0;
  for (const LabelId x : a) {
    for (size_t j = b.size(); j-- > 0;) {
      const uint32_t run = x == b[j] ? row[j] + 1 : 0;
      row[j + 1] = run;
      best = std::max(best, run);
    }
  }
  return best;
}

LcasResult Lcas(const ActionSequence& a, const ActionSequence& b) {
  LabelInterner interner;
  const InternedSequence ia = interner.Encode(a);
  const InternedSequence ib = interner.Encode(b);
  const LcasSpan span = LcasLocate(ia, ib);
  LcasResult result;
  result.length = span.length;
  result.witness.assign(a.labels.begin() + span.start_in_a,
                        a.labels.begin() + span.start_in_a + span.length);
  return result;
}

double SimAs(std::span<const LabelId> a, std::span<const LabelId> b) {
  if (a.empty() || b.empty()) return 0.0;
  const double lcas = static_cast<double>(LcasLength(a, b));
  return lcas * lcas /
         (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

double SimAs(const ActionSequence& a, const ActionSequence& b) {
  LabelInterner interner;
  const InternedSequence ia = interner.Encode(a);
  const InternedSequence ib = interner.Encode(b);
  return SimAs(ia, ib);
}

double SimOas(const ObjectCentricSequences& test,
              const ObjectCentricSequences& candidate) {
  if (test.empty() || candidate.empty()) return 0.0;
  LabelInterner interner;
  std::vector<InternedSequence> cand;
  cand.reserve(candidate.size());
  for (const auto& [object, seq] : candidate.per_object) {
    cand.push_back(interner.Encode(seq));
  }
  double total = 0.0;
  for (const auto& [object, seq] : test.per_object) {
    const InternedSequence query = interner.Encode(seq);
    double best = 0.0;
    for (const InternedSequence& c : cand) best = std::max(best, SimAs(query, c));
    total += best;
  }
  return total / static_cast<double>(test.size());
}

std::set<std::string> TaskTokens(std::string_view text) {
  std::set<std::string> tokens;
  std::istringstream in{std::string(text)};
  std::string word;
  auto alnum = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
  };
  while (in >> word) {
    auto first = std::find_if(word.begin(), word.end(), alnum);
    auto last = std::find_if(word.rbegin(), word.rend(), alnum).base();
    if (first >= last) continue;
    tokens.insert(ToLower(std::string_view(&*first, last - first)));
  }
  return tokens;
}

double SimTask(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  size_t common = 0;
  for (const std::string& token : a) common += b.count(token);
  const size_t uni = a.size() + b.size() - common;
  return static_cast<double>(common) / static_cast<double>(uni);
}

double SimTask(std::string_view task_a, std::string_view task_b) {
  return SimTask(TaskTokens(task_a), TaskTokens(task_b));
}

Distance Distance::FromScore(double score) {
  if (score <= 0.0) return Distance(kInfinity);
  return Distance(1.0 / score);
}

std::vector<double> ScoreBatch(std::span<const LabelId> query,
                               const std::vector<InternedSequence>& candidates,
                               size_t workers) {
  std::vector<double> scores(candidates.size(), 0.0);
  ParallelFor(
      candidates.size(),
      [&](size_t i) { scores[i] = SimAs(query, candidates[i]); }, workers);
  return scores;
}

}  // namespace plansel
