#include "plansel/run_io.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "plansel/logging.h"

namespace plansel {

namespace {

using nlohmann::json;

void CheckAgainst(const json& value, const json& defaults, const std::string& prefix) {
  if (!value.is_object()) {
    throw std::invalid_argument("settings" + (prefix.empty() ? "" : " key '" + prefix + "'") +
                                " must be an object");
  }
  for (const auto& [key, v] : value.items()) {
    const std::string dotted = prefix.empty() ? key : prefix + "." + key;
    if (!defaults.contains(key)) {
      throw std::invalid_argument("unknown settings key '" + dotted + "'");
    }
    const json& d = defaults[key];
    if (d.is_object()) {
      CheckAgainst(v, d, dotted);
    } else if (d.is_boolean() && !v.is_boolean()) {
      throw std::invalid_argument("settings key '" + dotted + "' must be a boolean");
    } else if (d.is_number_unsigned() && !v.is_number_unsigned()) {
      throw std::invalid_argument("settings key '" + dotted +
                                  "' must be a non-negative integer");
    } else if (d.is_number_float() && !v.is_number()) {
      throw std::invalid_argument("settings key '" + dotted + "' must be a number");
    } else if (d.is_string() && !v.is_string()) {
      throw std::invalid_argument("settings key '" + dotted + "' must be a string");
    }
  }
}

std::string ReadAll(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

std::string ToolVersion() { return PLANSEL_VERSION; }

json SettingsToJson(const RunSettings& s) {
  const PipelineConfig& p = s.pipeline;
  const HttpEndpointConfig& h = s.generator.http;
  return {
      {"mode", std::string(ToString(p.mode))},
      {"iterations", p.iterations},
      {"val_gated", p.val_gated},
      {"exemplar_count", p.exemplar_count},
      {"repr", std::string(ToString(p.repr))},
      {"seed", p.seed},
      {"max_output_tokens", p.max_output_tokens},
      {"initial_random_count", p.initial_random_count},
      {"concurrency", p.concurrency},
      {"dc",
       {{"n_c", p.dc.n_c},
        {"relevance_sigma", p.dc.relevance_sigma},
        {"must_keep_sigma", p.dc.must_keep_sigma},
        {"per_cluster_cap", p.dc.per_cluster_cap},
        {"linkage", std::string(ToString(p.dc.linkage))}}},
      {"generator",
       {{"kind", s.generator.kind},
        {"script", s.generator.script},
        {"threshold", s.generator.threshold},
        {"endpoint", h.endpoint},
        {"model", h.model},
        {"timeout_s", h.timeout_seconds},
        {"retries", h.retries},
        {"retry_backoff_ms", h.retry_backoff_ms},
        {"api_key_env", h.api_key_env}}},
      {"data",
       {{"pool", s.data.pool},
        {"tests", s.data.tests},
        {"domain", s.data.domain},
        {"exclude_invalid", s.data.exclude_invalid}}},
      {"output", {{"results", s.output.results}, {"manifest", s.output.manifest}}},
      {"log_level", s.log_level},
  };
}

json DefaultSettingsJson() { return SettingsToJson(RunSettings{}); }

RunSettings SettingsFromJson(const json& j) {
  json merged = DefaultSettingsJson();
  CheckAgainst(j, merged, "");
  merged.merge_patch(j);
  RunSettings s;
  PipelineConfig& p = s.pipeline;
  p.mode = ParseSelectionMode(merged["mode"].get<std::string>());
  p.iterations = merged["iterations"].get<size_t>();
  p.val_gated = merged["val_gated"].get<bool>();
  p.exemplar_count = merged["exemplar_count"].get<size_t>();
  p.repr = ParseReprKind(merged["repr"].get<std::string>());
  p.seed = merged["seed"].get<uint64_t>();
  p.max_output_tokens = merged["max_output_tokens"].get<size_t>();
  p.initial_random_count = merged["initial_random_count"].get<size_t>();
  p.concurrency = merged["concurrency"].get<size_t>();
  const json& dc = merged["dc"];
  p.dc.n_c = dc["n_c"].get<size_t>();
  p.dc.relevance_sigma = dc["relevance_sigma"].get<double>();
  p.dc.must_keep_sigma = dc["must_keep_sigma"].get<double>();
  p.dc.per_cluster_cap = dc["per_cluster_cap"].get<size_t>();
  p.dc.linkage = ParseLinkage(dc["linkage"].get<std::string>());
  const json& g = merged["generator"];
  s.generator.kind = g["kind"].get<std::string>();
  if (s.generator.kind != "echo-oracle" && s.generator.kind != "scripted" &&
      s.generator.kind != "threshold" && s.generator.kind != "http") {
    throw std::invalid_argument("settings key 'generator.kind': unknown generator '" +
                                s.generator.kind + "'");
  }
  s.generator.script = g["script"].get<std::string>();
  s.generator.threshold = g["threshold"].get<double>();
  s.generator.http.endpoint = g["endpoint"].get<std::string>();
  s.generator.http.model = g["model"].get<std::string>();
  s.generator.http.timeout_seconds = g["timeout_s"].get<double>();
  s.generator.http.retries = g["retries"].get<size_t>();
  s.generator.http.retry_backoff_ms = g["retry_backoff_ms"].get<size_t>();
  s.generator.http.api_key_env = g["api_key_env"].get<std::string>();
  const json& d = merged["data"];
  s.data.pool = d["pool"].get<std::string>();
  s.data.tests = d["tests"].get<std::string>();
  s.data.domain = d["domain"].get<std::string>();
  s.data.exclude_invalid = d["exclude_invalid"].get<bool>();
  s.output.results = merged["output"]["results"].get<std::string>();
  s.output.manifest = merged["output"]["manifest"].get<std::string>();
  s.log_level = merged["log_level"].get<std::string>();
  ParseLogLevel(s.log_level);
  return s;
}

void SetDottedKey(json* tree, const std::string& dotted, const std::string& text) {
  const json defaults = DefaultSettingsJson();
  const json::json_pointer ptr("/" + [&] {
    std::string p = dotted;
    std::replace(p.begin(), p.end(), '.', '/');
    return p;
  }());
  if (!defaults.contains(ptr) || defaults[ptr].is_object()) {
    throw std::invalid_argument("unknown settings key '" + dotted + "'");
  }
  const json& d = defaults[ptr];
  json value;
  try {
    if (d.is_boolean()) {
      if (text == "true" || text == "1" || text == "yes" || text == "on") {
        value = true;
      } else if (text == "false" || text == "0" || text == "no" || text == "off") {
        value = false;
      } else {
        throw std::invalid_argument("expected a boolean");
      }
    } else if (d.is_number_unsigned()) {
      size_t used = 0;
      if (!text.empty() && text[0] == '-') throw std::invalid_argument("negative");
      value = std::stoull(text, &used);
      if (used != text.size()) throw std::invalid_argument("trailing characters");
    } else if (d.is_number()) {
      size_t used = 0;
      value = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument("trailing characters");
    } else {
      value = text;
    }
  } catch (const std::exception&) {
    throw std::invalid_argument("bad value '" + text + "' for settings key '" + dotted + "'");
  }
  (*tree)[ptr] = value;
}

std::unique_ptr<PlanGenerator> MakeGenerator(const GeneratorSpec& spec,
                                             const std::vector<TestExample>& tests) {
  std::map<std::string, Plan> references;
  std::map<std::string, std::string> id_to_task;
  for (const TestExample& t : tests) {
    id_to_task[t.id] = t.task_text;
    if (t.reference) references[t.task_text] = *t.reference;
  }
  if (spec.kind == "echo-oracle") {
    return std::make_unique<EchoOracleGenerator>(std::move(references));
  }
  if (spec.kind == "threshold") {
    return std::make_unique<ThresholdGenerator>(std::move(references), spec.threshold);
  }
  if (spec.kind == "scripted") {
    if (spec.script.empty()) {
      throw std::invalid_argument("scripted generator needs generator.script");
    }
    return std::make_unique<ScriptedGenerator>(LoadScript(spec.script, id_to_task));
  }
  if (spec.kind == "http") {
    if (spec.http.endpoint.empty()) {
      throw std::invalid_argument("http generator needs generator.endpoint");
    }
    return std::make_unique<HttpGenerator>(spec.http);
  }
  throw std::invalid_argument("unknown generator kind '" + spec.kind +
                              "' (expected echo-oracle, scripted, threshold or http)");
}

json RecordToJson(const RunRecord& r) {
  json selected = json::array();
  for (const SelectedExemplar& s : r.selected) {
    selected.push_back({{"id", s.id}, {"score", s.score ? json(*s.score) : json(nullptr)}});
  }
  json validation = nullptr;
  if (r.validation) {
    const RecordValidation& v = *r.validation;
    validation = {{"executable", v.executable},
                  {"failure_index", v.failure_index ? json(*v.failure_index) : json(nullptr)},
                  {"failure_reason", v.failure_reason},
                  {"failure_detail", v.failure_detail},
                  {"failure_literal", v.failure_literal},
                  {"goal_satisfied", v.goal_satisfied}};
  }
  return {{"record_version", kResultsVersion},
          {"test_id", r.test_id},
          {"iteration", r.iteration},
          {"rule", std::string(ToString(r.rule))},
          {"selected", selected},
          {"prompt_digest", r.prompt_digest},
          {"response", r.response},
          {"plan", ToText(r.plan)},
          {"validation", validation},
          {"error", r.error},
          {"frozen", r.frozen},
          {"wall_time_ms", r.wall_time_ms},
          {"timestamp", r.timestamp}};
}

RunRecord RecordFromJson(const json& j) {
  if (!j.is_object() || j.value("record_version", 0) != kResultsVersion) {
    throw std::runtime_error("unsupported results record version");
  }
  RunRecord r;
  r.test_id = j.at("test_id").get<std::string>();
  r.iteration = j.at("iteration").get<size_t>();
  r.rule = ParseSelectionRule(j.at("rule").get<std::string>());
  for (const json& s : j.at("selected")) {
    SelectedExemplar e;
    e.id = s.at("id").get<std::string>();
    if (!s.at("score").is_null()) e.score = s.at("score").get<double>();
    r.selected.push_back(std::move(e));
  }
  r.prompt_digest = j.at("prompt_digest").get<std::string>();
  r.response = j.at("response").get<std::string>();
  r.plan = ParsePlan(j.at("plan").get<std::string>());
  if (!j.at("validation").is_null()) {
    const json& v = j.at("validation");
    RecordValidation rv;
    rv.executable = v.at("executable").get<bool>();
    if (!v.at("failure_index").is_null()) rv.failure_index = v.at("failure_index").get<size_t>();
    rv.failure_reason = v.at("failure_reason").get<std::string>();
    rv.failure_detail = v.at("failure_detail").get<std::string>();
    rv.failure_literal = v.at("failure_literal").get<std::string>();
    rv.goal_satisfied = v.at("goal_satisfied").get<bool>();
    r.validation = rv;
  }
  r.error = j.at("error").get<std::string>();
  r.frozen = j.at("frozen").get<bool>();
  r.wall_time_ms = j.at("wall_time_ms").get<double>();
  r.timestamp = j.at("timestamp").get<std::string>();
  return r;
}

void WriteResults(const std::string& path, const std::vector<RunRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  for (const RunRecord& r : records) out << RecordToJson(r).dump() << '\n';
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::vector<RunRecord> ReadResults(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::vector<RunRecord> out;
  std::string line;
  size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      out.push_back(RecordFromJson(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

std::string StableRecordLine(const RunRecord& record) {
  json j = RecordToJson(record);
  j.erase("timestamp");
  j.erase("wall_time_ms");
  return j.dump();
}

json SummaryToJson(const IterationSummary& s) {
  return {{"iteration", s.iteration},
          {"tests", s.tests},
          {"solved", s.solved},
          {"accuracy", s.accuracy ? json(*s.accuracy) : json(nullptr)},
          {"mean_exemplars", s.mean_exemplars},
          {"fallbacks", s.fallbacks},
          {"errors", s.errors}};
}

void SaveManifest(const RunManifest& m, const std::string& path) {
  const json j = {{"format", "plansel-run-manifest"},
                  {"version", m.version},
                  {"tool_version", m.tool_version},
                  {"created_at", m.created_at},
                  {"settings", m.settings},
                  {"digests", m.digests},
                  {"summaries", m.summaries}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

RunManifest LoadManifest(const std::string& path) {
  json j;
  try {
    j = json::parse(ReadAll(path));
  } catch (const json::exception& e) {
    throw std::runtime_error("manifest '" + path + "': " + e.what());
  }
  if (j.value("format", "") != "plansel-run-manifest") {
    throw std::runtime_error("'" + path + "' is not a run manifest");
  }
  RunManifest m;
  m.version = j.value("version", 0);
  if (m.version != kManifestVersion) {
    throw std::runtime_error("unsupported manifest version " + std::to_string(m.version));
  }
  m.tool_version = j.value("tool_version", "");
  m.created_at = j.value("created_at", "");
  m.settings = j.at("settings");
  m.digests = j.at("digests").get<std::map<std::string, std::string>>();
  m.summaries = j.value("summaries", json::array());
  return m;
}

}  // namespace plansel
