// Plan-side and task-side similarity.
//
// The plan similarity of two action sequences A and B is
//
//   |LCAS(A, B)|^2 / (|A| * |B|)
//
// where LCAS is the longest common contiguous run of labels. It is 0 when
// either sequence is empty.

#ifndef PLANSEL_SIMILARITY_H_
#define PLANSEL_SIMILARITY_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "plansel/plan_repr.h"

namespace plansel {

using LabelId = uint32_t;
using InternedSequence = std::vector<LabelId>;

// Query labels absent from the pool map here; it never matches a pool label.
inline constexpr LabelId kUnknownLabel = std::numeric_limits<LabelId>::max();

class LabelInterner {
 public:
  LabelId Intern(const std::string& label);
  std::optional<LabelId> Find(const std::string& label) const;
  const std::string& Label(LabelId id) const { return labels_.at(id); }
  size_t size() const { return labels_.size(); }

  // Interns every label (grows the table).
  InternedSequence Encode(const ActionSequence& seq);
  // Read-only; unseen labels become kUnknownLabel.
  InternedSequence EncodeQuery(const ActionSequence& seq) const;

 private:
  std::unordered_map<std::string, LabelId> ids_;
  std::vector<std::string> labels_;
};

struct LcasResult {
  size_t length = 0;
  // Earliest-starting (in the first argument) maximal common run.
  std::vector<std::string> witness;
};

LcasResult Lcas(const ActionSequence& a, const ActionSequence& b);

struct LcasSpan {
  size_t length = 0;
  size_t start_in_a = 0;
};

// O(|a|*|b|) time, O(min(|a|,|b|)) memory.
LcasSpan LcasLocate(std::span<const LabelId> a, std::span<const LabelId> b);
size_t LcasLength(std::span<const LabelId> a, std::span<const LabelId> b);

double SimAs(std::span<const LabelId> a, std::span<const LabelId> b);
double SimAs(const ActionSequence& a, const ActionSequence& b);

// For each test-side object, the best match among candidate-side objects;
// averaged over test-side objects. Directional: always pass the test side
// first.
double SimOas(const ObjectCentricSequences& test,
              const ObjectCentricSequences& candidate);

// Unigram set of a task description: lowercased, whitespace-split, with
// leading and trailing non-alphanumeric characters stripped.
std::set<std::string> TaskTokens(std::string_view text);

// |T1 ∩ T2| / |T1 ∪ T2| over unigram token sets (reported as "QA-F1" in the
// literature, though it is an intersection-over-union).
double SimTask(std::string_view task_a, std::string_view task_b);
double SimTask(const std::set<std::string>& a, const std::set<std::string>& b);

// Reciprocal of a similarity score. Infinite exactly when the score is 0.
class Distance {
 public:
  static Distance FromScore(double score);

  double value() const { return value_; }
  bool is_infinite() const { return value_ == kInfinity; }

 private:
  static constexpr double kInfinity = std::numeric_limits<double>::infinity();
  explicit Distance(double value) : value_(value) {}
  double value_;
};

// Scores one query against many candidates. Candidates are partitioned
// across workers; workers = 0 picks the hardware concurrency.
std::vector<double> ScoreBatch(std::span<const LabelId> query,
                               const std::vector<InternedSequence>& candidates,
                               size_t workers = 0);

}  // namespace plansel

#endif  // PLANSEL_SIMILARITY_H_
