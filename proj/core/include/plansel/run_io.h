// Run settings, results JSONL and run manifests.
//
// Settings are a JSON tree; DefaultSettingsJson() lists every key with its
// default. Results hold one RunRecord per line. A manifest captures the
// settings, tool version and input digests needed to replay a run.
#ifndef PLANSEL_RUN_IO_H_
#define PLANSEL_RUN_IO_H_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "plansel/http.h"
#include "plansel/pipeline.h"

namespace plansel {

inline constexpr int kResultsVersion = 1;
inline constexpr int kManifestVersion = 1;

std::string ToolVersion();

struct GeneratorSpec {
  // echo-oracle, scripted, threshold or http.
  std::string kind = "scripted";
  std::string script;
  double threshold = 0.5;
  HttpEndpointConfig http;
};

struct DataSpec {
  std::string pool;
  std::string tests;
  // Built-in domain name or PDDL file; empty runs without validation.
  std::string domain;
  bool exclude_invalid = false;
};

struct OutputSpec {
  std::string results = "results.jsonl";
  std::string manifest = "manifest.json";
};

struct RunSettings {
  PipelineConfig pipeline;
  GeneratorSpec generator;
  DataSpec data;
  OutputSpec output;
  std::string log_level = "warning";
};

nlohmann::json DefaultSettingsJson();
nlohmann::json SettingsToJson(const RunSettings& settings);
// Missing keys take defaults; unknown keys and wrong types throw
// std::invalid_argument naming the dotted key.
RunSettings SettingsFromJson(const nlohmann::json& j);

// Sets a dotted key ("dc.n_c") from command-line text, converting to the
// type of the default value at that key.
void SetDottedKey(nlohmann::json* tree, const std::string& dotted,
                  const std::string& text);

std::unique_ptr<PlanGenerator> MakeGenerator(const GeneratorSpec& spec,
                                             const std::vector<TestExample>& tests);

nlohmann::json RecordToJson(const RunRecord& record);
RunRecord RecordFromJson(const nlohmann::json& j);

// One compact JSON object per line, in record order.
void WriteResults(const std::string& path, const std::vector<RunRecord>& records);
std::vector<RunRecord> ReadResults(const std::string& path);

// Result line with the volatile fields (timestamp, wall_time_ms) removed.
std::string StableRecordLine(const RunRecord& record);

nlohmann::json SummaryToJson(const IterationSummary& summary);

struct RunManifest {
  int version = kManifestVersion;
  std::string tool_version;
  std::string created_at;
  nlohmann::json settings;
  // input name (pool, tests, domain, script) -> digest
  std::map<std::string, std::string> digests;
  nlohmann::json summaries = nlohmann::json::array();
};

void SaveManifest(const RunManifest& manifest, const std::string& path);
RunManifest LoadManifest(const std::string& path);

}  // namespace plansel

#endif  // PLANSEL_RUN_IO_H_
