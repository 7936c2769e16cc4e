// Loading exemplar pools and test sets.
//
// Pool sources:
//   - JSONL, one object per line:
//       {"id": str, "task": str, "plan_text"?: str, "actions"?: [str],
//        "object_actions"?: {obj: [str]}, "meta"?: any}
//     with at least one of plan_text / actions.
//   - a directory of <stem>.pddl problems with matching <stem>.plan files.
// Test sources:
//   - JSONL: {"id": str, "task": str, "reference_plan"?: str, "meta"?: any}
//   - a directory of <stem>.pddl problems; <stem>.plan, when present, is the
//     reference plan.
// Bad records never abort loading; they are listed in the report.
#ifndef PLANSEL_INGEST_H_
#define PLANSEL_INGEST_H_

#include <string>
#include <vector>

#include "plansel/pipeline.h"
#include "plansel/pool.h"

namespace plansel {

struct IngestIssue {
  std::string source;  // file path
  size_t line = 0;     // 1-based JSONL line, 0 for directory entries
  std::string id;
  std::string message;
};

struct IngestReport {
  size_t records_read = 0;
  size_t loaded = 0;
  // Records that could not be loaded at all.
  std::vector<IngestIssue> rejected;
  // Plans that do not solve their own problem under the domain.
  std::vector<IngestIssue> invalid_plans;
  size_t excluded_invalid = 0;
};

struct IngestOptions {
  // Enables execution-based representations and plan validation.
  const Domain* domain = nullptr;
  // Drop exemplars whose plan fails validation (they are kept and flagged
  // otherwise).
  bool exclude_invalid = false;
};

struct PoolIngestion {
  ExemplarPool pool;
  IngestReport report;
};

struct TestIngestion {
  std::vector<TestExample> tests;
  IngestReport report;
};

// Throws std::runtime_error only when the path itself cannot be read.
PoolIngestion IngestPool(const std::string& path, const IngestOptions& options = {});
TestIngestion IngestTests(const std::string& path, const IngestOptions& options = {});

// Digest of a file, or of a directory as the sorted list of (name, digest).
std::string PathDigest(const std::string& path);

}  // namespace plansel

#endif  // PLANSEL_INGEST_H_
