// plansel command-line front end.
//
// Exit codes: 0 success, 1 usage or input error, 2 a validated plan does not
// solve its problem (validate only).

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "plansel/bpe.h"
#include "plansel/builtin_domains.h"
#include "plansel/flops.h"
#include "plansel/http.h"
#include "plansel/ingest.h"
#include "plansel/logging.h"
#include "plansel/pipeline.h"
#include "plansel/prompt.h"
#include "plansel/proxy.h"
#include "plansel/run_io.h"

namespace {

using nlohmann::json;
using namespace plansel;

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const size_t b = item.find_first_not_of(" \t");
    const size_t e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

void LogReport(const std::string& what, const IngestReport& r) {
  Log(LogLevel::kInfo, what + ": loaded " + std::to_string(r.loaded) + " of " +
                           std::to_string(r.records_read) + " records");
  for (const IngestIssue& i : r.rejected) {
    Log(LogLevel::kWarning, what + " rejected " + i.source +
                                (i.line ? ":" + std::to_string(i.line) : "") +
                                (i.id.empty() ? "" : " (" + i.id + ")") + ": " + i.message);
  }
  for (const IngestIssue& i : r.invalid_plans) {
    Log(LogLevel::kWarning, what + " invalid plan " + i.id + ": " + i.message);
  }
}

std::optional<Domain> MaybeDomain(const std::string& spec) {
  if (spec.empty()) return std::nullopt;
  return LoadDomain(spec);
}

// Options shared by commands that read a pool.
struct PoolOptions {
  std::string pool;
  std::string domain;
  bool exclude_invalid = false;

  void Add(CLI::App* cmd) {
    cmd->add_option("--pool", pool, "Pool JSONL file or directory of .pddl/.plan pairs")
        ->required();
    cmd->add_option("--domain", domain, "Built-in domain name or PDDL domain file");
    cmd->add_flag("--exclude-invalid", exclude_invalid,
                  "Drop exemplars whose plan does not solve their problem");
  }

  PoolIngestion Load(const Domain* d) const {
    PoolIngestion in = IngestPool(pool, {d, exclude_invalid});
    LogReport("pool", in.report);
    return in;
  }
};

// Query plan given as a plan file, inline actions or object actions.
struct QueryOptions {
  std::string plan_file;
  std::string actions;
  std::string problem_file;
  std::string repr = "as";

  void Add(CLI::App* cmd) {
    cmd->add_option("--query-plan", plan_file, "Plan file for the query (tolerant parsing)");
    cmd->add_option("--query-actions", actions, "Comma-separated action labels (AS only)");
    cmd->add_option("--query-problem", problem_file,
                    "Problem of the query plan; needed for es/oes");
    cmd->add_option("--repr", repr, "Representation: as, oas, es, oes")->capture_default_str();
  }

  PlanQuery Build(const Domain* domain) const {
    const ReprKind kind = ParseReprKind(repr);
    if (!actions.empty()) {
      if (kind != ReprKind::kAs) {
        throw std::invalid_argument("--query-actions only supports --repr as");
      }
      return PlanQuery::Flat(kind, ActionSequence{SplitList(actions)});
    }
    if (plan_file.empty()) {
      throw std::invalid_argument("give --query-plan or --query-actions");
    }
    const Plan plan = ParsePlanTolerant(ReadText(plan_file), domain);
    TestExample test;
    test.id = "query";
    if (!problem_file.empty()) test.task_text = ReadText(problem_file);
    if (NeedsExecution(kind) && (domain == nullptr || problem_file.empty())) {
      throw std::invalid_argument("--repr " + repr + " needs --domain and --query-problem");
    }
    return BuildQuery(kind, plan, test, domain);
  }
};

struct EmbedderOptions {
  std::string kind = "hashed";
  size_t dimension = 256;
  uint64_t seed = 0;
  HttpEndpointConfig http;

  void Add(CLI::App* cmd) {
    cmd->add_option("--embedder", kind, "hashed or http")->capture_default_str();
    cmd->add_option("--embed-dim", dimension, "Embedding dimension")->capture_default_str();
    cmd->add_option("--embed-seed", seed, "Hashed embedder seed")->capture_default_str();
    cmd->add_option("--embed-endpoint", http.endpoint, "HTTP embedding endpoint");
    cmd->add_option("--embed-model", http.model, "HTTP embedding model name");
    cmd->add_option("--embed-timeout", http.timeout_seconds, "HTTP timeout in seconds");
    cmd->add_option("--embed-retries", http.retries, "HTTP retries");
    cmd->add_option("--api-key-env", http.api_key_env,
                    "Environment variable holding the API key")
        ->capture_default_str();
  }

  std::unique_ptr<Embedder> Make() const {
    if (kind == "hashed") return std::make_unique<HashedEmbedder>(dimension, seed);
    if (kind == "http") return std::make_unique<HttpEmbedder>(http, dimension);
    throw std::invalid_argument("unknown embedder '" + kind + "'");
  }
};

int CmdValidate(const std::string& domain_spec, const std::string& problem_file,
                const std::string& plan_file, bool tolerant) {
  const Domain domain = LoadDomain(domain_spec);
  const Problem problem = ParseProblem(ReadText(problem_file), domain);
  const std::string text = ReadText(plan_file);
  const Plan plan = tolerant ? ParsePlanTolerant(text, &domain) : ParsePlan(text);
  const ValidationReport r = Validate(domain, problem, plan);
  json out = {{"steps", plan.size()},
              {"executable", r.executable},
              {"goal_satisfied", r.goal_satisfied},
              {"failure_index", r.failure_index ? json(*r.failure_index) : json(nullptr)}};
  if (r.failure) {
    out["failure_reason"] = ToString(r.failure->reason);
    out["failure_detail"] = r.failure->detail;
    out["failure_literal"] = r.failure->literal ? json(ToString(*r.failure->literal)) : json(nullptr);
  }
  json unsat = json::array();
  for (const Literal& l : r.unsatisfied_goals) unsat.push_back(ToString(l));
  out["unsatisfied_goals"] = unsat;
  std::cout << out.dump(2) << '\n';
  return r.goal_satisfied ? 0 : 2;
}

int CmdScore(const PoolOptions& pool_opts, const QueryOptions& query,
             const std::string& index_path, const std::string& task_file,
             const EmbedderOptions& embed, size_t top, bool clamp) {
  const std::optional<Domain> domain = MaybeDomain(pool_opts.domain);
  const PoolIngestion in = pool_opts.Load(domain ? &*domain : nullptr);
  std::vector<double> scores;
  if (!index_path.empty()) {
    if (task_file.empty()) throw std::invalid_argument("--proxy-index needs --task");
    const ProxyIndex index = LoadProxyIndex(index_path);
    if (index.candidate_ids.size() != in.pool.size()) {
      throw std::invalid_argument("proxy index was built for a different pool");
    }
    for (size_t i = 0; i < in.pool.size(); ++i) {
      if (index.candidate_ids[i] != in.pool.at(i).id) {
        throw std::invalid_argument("proxy index was built for a different pool");
      }
    }
    scores = ProxyScore(ReadText(task_file), index, *embed.Make(), {.clamp_negative = clamp});
  } else {
    scores = ScoreCandidates(query.Build(domain ? &*domain : nullptr), in.pool);
  }
  const auto ranking = RankByScores(in.pool, scores);
  for (size_t i = 0; i < std::min(top, ranking.size()); ++i) {
    std::cout << json{{"rank", i + 1}, {"id", ranking[i].candidate_id}, {"score", ranking[i].score}}
                     .dump()
              << '\n';
  }
  return 0;
}

int CmdSelect(const PoolOptions& pool_opts, const QueryOptions& query,
              const std::string& method, size_t n, const DcConfig& dc) {
  const std::optional<Domain> domain = MaybeDomain(pool_opts.domain);
  const PoolIngestion in = pool_opts.Load(domain ? &*domain : nullptr);
  const PlanQuery q = query.Build(domain ? &*domain : nullptr);
  json out;
  if (method == "top-n") {
    const auto ranking = RankCandidates(q, in.pool);
    json sel = json::array();
    for (size_t i = 0; i < std::min(n, ranking.size()); ++i) {
      sel.push_back({{"id", ranking[i].candidate_id}, {"score", ranking[i].score}});
    }
    out = {{"method", method}, {"selected", sel}};
  } else if (method == "dc") {
    const SelectionResult r = DynamicClusterSelect(q, in.pool, dc);
    json sel = json::array();
    for (size_t i = 0; i < r.selected_ids.size(); ++i) {
      sel.push_back({{"id", r.selected_ids[i]}, {"score", r.selected_scores[i]}});
    }
    const SelectionDiagnostics& d = r.diagnostics;
    out = {{"method", method},
           {"selected", sel},
           {"must_keep", r.must_keep_ids},
           {"cluster_assignment", r.cluster_assignment},
           {"diagnostics",
            {{"pool_size", d.pool_size},
             {"must_keep_size", d.must_keep_size},
             {"relevance_size", d.relevance_size},
             {"cluster_count", d.cluster_count},
             {"mean", d.mean},
             {"stddev", d.stddev},
             {"relevance_threshold", d.relevance_threshold},
             {"must_keep_threshold", d.must_keep_threshold}}}};
  } else {
    throw std::invalid_argument("--method must be top-n or dc");
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int CmdBpeTrain(const PoolOptions& pool_opts, const std::string& out_path,
                size_t merges, size_t min_frequency) {
  const std::optional<Domain> domain = MaybeDomain(pool_opts.domain);
  const PoolIngestion in = pool_opts.Load(domain ? &*domain : nullptr);
  in.pool.RequireRepr(ReprKind::kAs);
  std::vector<ActionSequence> corpus;
  for (const Exemplar& e : in.pool.exemplars()) corpus.push_back(*e.as);
  const BpeVocab vocab = BpeTrain(corpus, merges, min_frequency);
  SaveVocab(vocab, out_path);
  std::cout << json{{"merges", vocab.merge_log.size()}, {"tokens", vocab.tokens.size()},
                    {"vocab", out_path}}
                   .dump()
            << '\n';
  return 0;
}

int CmdProxyIndex(const PoolOptions& pool_opts, const std::string& vocab_path,
                  const std::string& out_path, const EmbedderOptions& embed) {
  const std::optional<Domain> domain = MaybeDomain(pool_opts.domain);
  const PoolIngestion in = pool_opts.Load(domain ? &*domain : nullptr);
  const BpeVocab vocab = LoadVocab(vocab_path);
  const ProxyIndex index = BuildProxyIndex(vocab, in.pool, *embed.Make());
  SaveProxyIndex(index, out_path);
  std::cout << json{{"tokens", index.token_count()},
                    {"candidates", index.pool_size()},
                    {"embedder", index.embedder_fingerprint},
                    {"index", out_path}}
                   .dump()
            << '\n';
  return 0;
}

std::map<std::string, std::string> InputDigests(const RunSettings& s) {
  std::map<std::string, std::string> d;
  if (!s.data.pool.empty()) d["pool"] = PathDigest(s.data.pool);
  if (!s.data.tests.empty()) d["tests"] = PathDigest(s.data.tests);
  if (!s.data.domain.empty()) {
    const auto builtin = BuiltinDomainText(s.data.domain);
    d["domain"] = builtin ? Sha256Digest(*builtin) : PathDigest(s.data.domain);
  }
  if (s.generator.kind == "scripted" && !s.generator.script.empty()) {
    d["script"] = PathDigest(s.generator.script);
  }
  return d;
}

std::string UtcNow() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int CmdRun(const std::string& config_path, const std::string& manifest_path,
           bool allow_mismatch, const std::map<std::string, std::string>& overrides) {
  json tree = DefaultSettingsJson();
  std::optional<RunManifest> replay;
  if (!manifest_path.empty()) {
    replay = LoadManifest(manifest_path);
    tree = replay->settings;
  } else if (!config_path.empty()) {
    json file;
    try {
      file = json::parse(ReadText(config_path));
    } catch (const json::exception& e) {
      throw std::invalid_argument("config '" + config_path + "': " + e.what());
    }
    SettingsFromJson(file);  // rejects unknown keys and bad types
    tree.merge_patch(file);
  }
  for (const auto& [key, value] : overrides) SetDottedKey(&tree, key, value);
  if (replay) {
    const RunSettings original = SettingsFromJson(replay->settings);
    if (!overrides.count("output.results")) {
      tree["output"]["results"] = original.output.results + ".replay.jsonl";
    }
    if (!overrides.count("output.manifest")) {
      tree["output"]["manifest"] = original.output.manifest + ".replay.json";
    }
  }
  const RunSettings s = SettingsFromJson(tree);
  SetLogLevel(ParseLogLevel(s.log_level));
  if (s.data.pool.empty() || s.data.tests.empty()) {
    throw std::invalid_argument("data.pool and data.tests are required");
  }

  const std::map<std::string, std::string> digests = InputDigests(s);
  if (replay) {
    for (const auto& [name, digest] : replay->digests) {
      auto it = digests.find(name);
      if (it == digests.end() || it->second != digest) {
        const std::string msg = "input '" + name + "' differs from the manifest";
        if (!allow_mismatch) throw std::runtime_error(msg + " (use --allow-digest-mismatch)");
        Log(LogLevel::kWarning, msg);
      }
    }
  }

  const std::optional<Domain> domain = MaybeDomain(s.data.domain);
  const Domain* dptr = domain ? &*domain : nullptr;
  const PoolIngestion pool = IngestPool(s.data.pool, {dptr, s.data.exclude_invalid});
  LogReport("pool", pool.report);
  const TestIngestion tests = IngestTests(s.data.tests, {dptr, false});
  LogReport("tests", tests.report);
  const std::unique_ptr<PlanGenerator> generator = MakeGenerator(s.generator, tests.tests);
  const RunResult result = RunPipeline(tests.tests, pool.pool, *generator, dptr, s.pipeline);
  WriteResults(s.output.results, result.records);

  RunManifest manifest;
  manifest.tool_version = ToolVersion();
  manifest.created_at = UtcNow();
  manifest.settings = SettingsToJson(s);
  manifest.digests = digests;
  for (const IterationSummary& it : result.summaries) {
    manifest.summaries.push_back(SummaryToJson(it));
  }
  SaveManifest(manifest, s.output.manifest);
  std::cout << json{{"results", s.output.results},
                    {"manifest", s.output.manifest},
                    {"summaries", manifest.summaries}}
                   .dump(2)
            << '\n';
  return 0;
}

int CmdEval(const std::string& results_path, const std::string& tests_path,
            const std::string& iteration) {
  const std::vector<RunRecord> records = ReadResults(results_path);
  std::vector<std::string> ids;
  if (!tests_path.empty()) {
    const TestIngestion tests = IngestTests(tests_path);
    LogReport("tests", tests.report);
    for (const TestExample& t : tests.tests) ids.push_back(t.id);
  } else {
    for (const RunRecord& r : records) {
      if (r.iteration == 0) ids.push_back(r.test_id);
    }
  }
  size_t last = 0;
  for (const RunRecord& r : records) last = std::max(last, r.iteration);
  std::vector<size_t> iterations;
  if (iteration == "all") {
    for (size_t i = 0; i <= last && !records.empty(); ++i) iterations.push_back(i);
  } else if (iteration == "last") {
    iterations.push_back(last);
  } else {
    iterations.push_back(std::stoul(iteration));
  }
  json out = json::array();
  for (size_t i : iterations) {
    out.push_back({{"iteration", i}, {"tests", ids.size()}, {"accuracy", Evaluate(records, ids, i)}});
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int CmdFlops(const FlopsScenario& scenario, const std::string& method) {
  std::vector<FlopsMethod> methods;
  if (method == "all") {
    methods = {FlopsMethod::kInferenceOnly, FlopsMethod::kBaselineAs, FlopsMethod::kGrase,
               FlopsMethod::kGraseStar, FlopsMethod::kProxy};
  } else {
    methods.push_back(ParseFlopsMethod(method));
  }
  json out = json::array();
  for (FlopsMethod m : methods) {
    const FlopsBreakdown b = EstimateFlops(scenario, m);
    out.push_back({{"method", ToString(m)},
                   {"preparation", b.preparation},
                   {"selection", b.selection},
                   {"inference", b.inference},
                   {"total", b.total()},
                   {"cpu_lcas", b.cpu_lcas}});
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

// Adds one --<dotted.key> option per settings leaf.
void AddSettingsFlags(CLI::App* cmd, const json& node, const std::string& prefix,
                      std::map<std::string, std::string>* values) {
  for (const auto& [key, v] : node.items()) {
    const std::string dotted = prefix.empty() ? key : prefix + "." + key;
    if (v.is_object()) {
      AddSettingsFlags(cmd, v, dotted, values);
      continue;
    }
    cmd->add_option_function<std::string>(
           "--" + dotted, [values, dotted](const std::string& s) { (*values)[dotted] = s; },
           "Settings key " + dotted + " (default " + v.dump() + ")")
        ->group("Settings");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plan-similarity exemplar selection for LLM planning"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ToolVersion());
  std::string log_level = "warning";
  app.add_option("--log-level", log_level, "debug, info, warning, error or off")
      ->capture_default_str();

  std::function<int()> action;

  // validate
  auto* validate = app.add_subcommand("validate", "Validate a plan against a problem");
  std::string v_domain, v_problem, v_plan;
  bool v_tolerant = false;
  validate->add_option("--domain", v_domain, "Built-in domain name or PDDL domain file")->required();
  validate->add_option("--problem", v_problem, "PDDL problem file")->required();
  validate->add_option("--plan", v_plan, "Plan file")->required();
  validate->add_flag("--tolerant", v_tolerant, "Extract actions from free text");
  validate->callback([&] { action = [&] { return CmdValidate(v_domain, v_problem, v_plan, v_tolerant); }; });

  // score
  auto* score = app.add_subcommand("score", "Score every pool candidate against a query");
  PoolOptions s_pool;
  QueryOptions s_query;
  EmbedderOptions s_embed;
  std::string s_index, s_task;
  size_t s_top = 20;
  bool s_clamp = false;
  s_pool.Add(score);
  s_query.Add(score);
  s_embed.Add(score);
  score->add_option("--proxy-index", s_index, "Score by proxy index instead of LCAS");
  score->add_option("--task", s_task, "Task text file (proxy scoring)");
  score->add_option("--top", s_top, "Rows to print")->capture_default_str();
  score->add_flag("--clamp-negative", s_clamp, "Clamp negative proxy cosines to 0");
  score->callback([&] {
    action = [&] { return CmdScore(s_pool, s_query, s_index, s_task, s_embed, s_top, s_clamp); };
  });

  // select
  auto* select = app.add_subcommand("select", "Select exemplars for a query");
  PoolOptions sel_pool;
  QueryOptions sel_query;
  std::string sel_method = "dc";
  size_t sel_n = 10;
  DcConfig sel_dc;
  std::string sel_linkage = "average";
  sel_pool.Add(select);
  sel_query.Add(select);
  select->add_option("--method", sel_method, "top-n or dc")->capture_default_str();
  select->add_option("--n", sel_n, "Exemplars for top-n")->capture_default_str();
  select->add_option("--n-c", sel_dc.n_c, "Cluster-count multiplier")->capture_default_str();
  select->add_option("--relevance-sigma", sel_dc.relevance_sigma)->capture_default_str();
  select->add_option("--must-keep-sigma", sel_dc.must_keep_sigma)->capture_default_str();
  select->add_option("--per-cluster-cap", sel_dc.per_cluster_cap)->capture_default_str();
  select->add_option("--linkage", sel_linkage, "average, complete or single")->capture_default_str();
  select->callback([&] {
    action = [&] {
      sel_dc.linkage = ParseLinkage(sel_linkage);
      return CmdSelect(sel_pool, sel_query, sel_method, sel_n, sel_dc);
    };
  });

  // bpe-train
  auto* bpe = app.add_subcommand("bpe-train", "Learn frequent action subsequences");
  PoolOptions b_pool;
  std::string b_out;
  size_t b_merges = kDefaultBpeMerges;
  size_t b_min = kDefaultBpeMinFrequency;
  b_pool.Add(bpe);
  bpe->add_option("--out", b_out, "Vocab file to write")->required();
  bpe->add_option("--merges", b_merges, "Maximum merges")->capture_default_str();
  bpe->add_option("--min-frequency", b_min, "Keep tokens at least this frequent")->capture_default_str();
  bpe->callback([&] { action = [&] { return CmdBpeTrain(b_pool, b_out, b_merges, b_min); }; });

  // proxy-index
  auto* proxy = app.add_subcommand("proxy-index", "Precompute the proxy scoring index");
  PoolOptions p_pool;
  EmbedderOptions p_embed;
  std::string p_vocab, p_out;
  p_pool.Add(proxy);
  p_embed.Add(proxy);
  proxy->add_option("--vocab", p_vocab, "Vocab file from bpe-train")->required();
  proxy->add_option("--out", p_out, "Index file to write")->required();
  proxy->callback([&] { action = [&] { return CmdProxyIndex(p_pool, p_vocab, p_out, p_embed); }; });

  // run
  auto* run = app.add_subcommand("run", "Run the selection and generation loop");
  std::string r_config, r_manifest;
  bool r_allow = false;
  std::map<std::string, std::string> r_overrides;
  run->add_option("--config", r_config, "JSON settings file")->check(CLI::ExistingFile);
  run->add_option("--manifest", r_manifest, "Replay the run described by a manifest")
      ->check(CLI::ExistingFile)
      ->excludes("--config");
  run->add_flag("--allow-digest-mismatch", r_allow, "Replay even if inputs changed");
  AddSettingsFlags(run, DefaultSettingsJson(), "", &r_overrides);
  run->callback([&] { action = [&] { return CmdRun(r_config, r_manifest, r_allow, r_overrides); }; });

  // eval
  auto* eval = app.add_subcommand("eval", "Planning accuracy from a results file");
  std::string e_results, e_tests, e_iteration = "all";
  eval->add_option("--results", e_results, "Results JSONL")->required();
  eval->add_option("--tests", e_tests, "Test set; defaults to the tests seen at iteration 0");
  eval->add_option("--iteration", e_iteration, "Iteration index, last or all")->capture_default_str();
  eval->callback([&] { action = [&] { return CmdEval(e_results, e_tests, e_iteration); }; });

  // flops
  auto* flops = app.add_subcommand("flops", "Estimate FLOPs per test example");
  FlopsScenario f;
  std::string f_method = "all";
  flops->add_option("--method", f_method,
                    "baseline_as, grase, grase_star, proxy, inference_only or all")
      ->capture_default_str();
  flops->add_option("--pool-size", f.pool_size)->capture_default_str();
  flops->add_option("--k", f.tokens_per_example, "Tokens per task or plan")->capture_default_str();
  flops->add_option("--generator-params", f.generator_params)->capture_default_str();
  flops->add_option("--embedder-params", f.embedder_params)->capture_default_str();
  flops->add_option("--embedding-dim", f.embedding_dim)->capture_default_str();
  flops->add_option("--context-exemplars", f.context_exemplars)->capture_default_str();
  flops->add_option("--proxy-tokens", f.proxy_tokens)->capture_default_str();
  flops->add_option("--initial-random", f.initial_random_exemplars)->capture_default_str();
  flops->callback([&] { action = [&] { return CmdFlops(f, f_method); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    SetLogLevel(ParseLogLevel(log_level));
    return action();
  } catch (const std::exception& e) {
    std::cerr << "plansel: " << e.what() << '\n';
    return 1;
  }
}
