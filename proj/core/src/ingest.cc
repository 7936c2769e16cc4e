#include "plansel/ingest.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "plansel/prompt.h"

namespace plansel {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// One raw record before type-specific conversion.
struct RawRecord {
  std::string source;
  size_t line = 0;
  json value;
};

std::vector<RawRecord> ReadJsonl(const std::string& path, IngestReport* report) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::vector<RawRecord> out;
  std::string line;
  size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++report->records_read;
    try {
      json v = json::parse(line);
      if (!v.is_object()) throw std::runtime_error("record is not a JSON object");
      out.push_back({path, number, std::move(v)});
    } catch (const std::exception& e) {
      report->rejected.push_back({path, number, "", e.what()});
    }
  }
  return out;
}

// Directory entries: {"id", "task", "<plan_key>"?}.
std::vector<RawRecord> ReadDirectory(const std::string& path,
                                     const std::string& plan_key,
                                     bool plan_required, IngestReport* report) {
  std::vector<fs::path> problems;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pddl") {
      problems.push_back(entry.path());
    }
  }
  std::sort(problems.begin(), problems.end());
  std::vector<RawRecord> out;
  for (const fs::path& problem : problems) {
    ++report->records_read;
    const std::string id = problem.stem().string();
    fs::path plan = problem;
    plan.replace_extension(".plan");
    try {
      json v = {{"id", id}, {"task", ReadFile(problem)}};
      if (fs::exists(plan)) {
        v[plan_key] = ReadFile(plan);
      } else if (plan_required) {
        throw std::runtime_error("missing plan file " + plan.filename().string());
      }
      out.push_back({problem.string(), 0, std::move(v)});
    } catch (const std::exception& e) {
      report->rejected.push_back({problem.string(), 0, id, e.what()});
    }
  }
  return out;
}

std::string RequireString(const json& v, const char* key) {
  if (!v.contains(key) || !v[key].is_string()) {
    throw std::runtime_error(std::string("missing string field '") + key + "'");
  }
  return v[key].get<std::string>();
}

std::vector<std::string> StringList(const json& v, const char* what) {
  if (!v.is_array()) throw std::runtime_error(std::string(what) + " must be a list");
  std::vector<std::string> out;
  for (const json& s : v) {
    if (!s.is_string() || s.get<std::string>().empty()) {
      throw std::runtime_error(std::string(what) + " entries must be non-empty strings");
    }
    out.push_back(s.get<std::string>());
  }
  return out;
}

Exemplar ToExemplar(const json& v) {
  Exemplar e;
  e.id = RequireString(v, "id");
  if (e.id.empty()) throw std::runtime_error("empty id");
  e.task_text = RequireString(v, "task");
  const bool has_plan = v.contains("plan_text") && !v["plan_text"].is_null();
  const bool has_actions = v.contains("actions") && !v["actions"].is_null();
  if (!has_plan && !has_actions) {
    throw std::runtime_error("record needs plan_text or actions");
  }
  if (has_plan) {
    e.plan_text = RequireString(v, "plan_text");
    e.plan = ParsePlan(e.plan_text);
  }
  if (has_actions) {
    ActionSequence as{StringList(v["actions"], "actions")};
    if (e.plan && ToAs(*e.plan) != as) {
      throw std::runtime_error("actions disagree with plan_text");
    }
    e.as = std::move(as);
  }
  if (v.contains("object_actions") && !v["object_actions"].is_null()) {
    const json& oa = v["object_actions"];
    if (!oa.is_object()) throw std::runtime_error("object_actions must be an object");
    ObjectCentricSequences oas;
    for (const auto& [obj, seq] : oa.items()) {
      oas.per_object[obj] = ActionSequence{StringList(seq, "object_actions")};
    }
    e.oas = std::move(oas);
  }
  if (v.contains("meta")) e.meta_json = v["meta"].dump();
  return e;
}

// Validates a plan against the task when the task is a problem of the
// domain. Returns an empty string when valid or not checkable.
std::string PlanProblem(const std::string& task, const Plan& plan,
                        const Domain* domain) {
  if (domain == nullptr) return {};
  Problem problem;
  try {
    problem = ParseProblem(task, *domain);
  } catch (const std::exception&) {
    return {};
  }
  const ValidationReport r = Validate(*domain, problem, plan);
  if (r.goal_satisfied) return {};
  if (!r.executable) {
    return "plan fails at step " + std::to_string(*r.failure_index) + ": " +
           std::string(ToString(r.failure->reason)) + " " + r.failure->detail;
  }
  return "plan is executable but does not reach the goal";
}

}  // namespace

PoolIngestion IngestPool(const std::string& path, const IngestOptions& options) {
  IngestReport report;
  const std::vector<RawRecord> raw =
      fs::is_directory(path) ? ReadDirectory(path, "plan_text", true, &report)
                             : ReadJsonl(path, &report);
  std::vector<Exemplar> exemplars;
  std::set<std::string> seen;
  for (const RawRecord& r : raw) {
    std::string id = r.value.contains("id") && r.value["id"].is_string()
                         ? r.value["id"].get<std::string>()
                         : "";
    try {
      Exemplar e = ToExemplar(r.value);
      if (!seen.insert(e.id).second) throw std::runtime_error("duplicate id");
      if (e.plan) {
        const std::string problem = PlanProblem(e.task_text, *e.plan, options.domain);
        if (!problem.empty()) {
          report.invalid_plans.push_back({r.source, r.line, e.id, problem});
          if (options.exclude_invalid) {
            ++report.excluded_invalid;
            continue;
          }
        }
      }
      DeriveRepresentations(&e, options.domain);
      exemplars.push_back(std::move(e));
    } catch (const std::exception& e) {
      report.rejected.push_back({r.source, r.line, id, e.what()});
    }
  }
  report.loaded = exemplars.size();
  return {ExemplarPool(std::move(exemplars)), std::move(report)};
}

TestIngestion IngestTests(const std::string& path, const IngestOptions& options) {
  IngestReport report;
  const std::vector<RawRecord> raw =
      fs::is_directory(path) ? ReadDirectory(path, "reference_plan", false, &report)
                             : ReadJsonl(path, &report);
  TestIngestion out;
  std::set<std::string> seen;
  for (const RawRecord& r : raw) {
    std::string id = r.value.contains("id") && r.value["id"].is_string()
                         ? r.value["id"].get<std::string>()
                         : "";
    try {
      TestExample t;
      t.id = RequireString(r.value, "id");
      if (t.id.empty()) throw std::runtime_error("empty id");
      t.task_text = RequireString(r.value, "task");
      if (r.value.contains("reference_plan") && !r.value["reference_plan"].is_null()) {
        t.reference = ParsePlan(RequireString(r.value, "reference_plan"));
        const std::string problem = PlanProblem(t.task_text, *t.reference, options.domain);
        if (!problem.empty()) {
          report.invalid_plans.push_back({r.source, r.line, t.id, problem});
        }
      }
      if (!seen.insert(t.id).second) throw std::runtime_error("duplicate id");
      out.tests.push_back(std::move(t));
    } catch (const std::exception& e) {
      report.rejected.push_back({r.source, r.line, id, e.what()});
    }
  }
  report.loaded = out.tests.size();
  out.report = std::move(report);
  return out;
}

std::string PathDigest(const std::string& path) {
  if (!fs::is_directory(path)) return Sha256Digest(ReadFile(path));
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::string listing;
  for (const fs::path& f : files) {
    listing += f.filename().string() + " " + Sha256Digest(ReadFile(f)) + "\n";
  }
  return Sha256Digest(listing);
}

}  // namespace plansel
