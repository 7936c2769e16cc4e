#include "plansel/generator.h"

#include <fstream>

#include "json.hpp"
#include "plansel/plan_repr.h"
#include "plansel/prompt.h"
#include "plansel/similarity.h"

namespace plansel {

EchoOracleGenerator::EchoOracleGenerator(std::map<std::string, Plan> references)
    : references_(std::move(references)) {}

std::string EchoOracleGenerator::Generate(std::string_view prompt, size_t) {
  const PromptParts parts = ParsePrompt(prompt);
  auto it = references_.find(parts.test_task);
  return it == references_.end() ? std::string() : ToText(it->second);
}

ThresholdGenerator::ThresholdGenerator(std::map<std::string, Plan> references,
                                       double threshold)
    : references_(std::move(references)), threshold_(threshold) {}

std::string ThresholdGenerator::Generate(std::string_view prompt, size_t) {
  const PromptParts parts = ParsePrompt(prompt);
  auto it = references_.find(parts.test_task);
  if (it == references_.end()) return {};
  const Plan& reference = it->second;
  const ActionSequence target = ToAs(reference);
  for (const PromptExemplar& e : parts.exemplars) {
    if (SimAs(ToAs(ParsePlanTolerant(e.plan)), target) >= threshold_) {
      return ToText(reference);
    }
  }
  Plan partial = reference;
  if (!partial.steps.empty()) partial.steps.pop_back();
  return ToText(partial);
}

ScriptedGenerator::ScriptedGenerator(
    std::map<std::string, std::vector<std::string>> script)
    : script_(std::move(script)) {}

std::string ScriptedGenerator::Generate(std::string_view prompt, size_t) {
  const std::string task = ParsePrompt(prompt).test_task;
  auto it = script_.find(task);
  if (it == script_.end() || it->second.empty()) return {};
  size_t call = 0;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    call = calls_[task]++;
  }
  const std::vector<std::string>& responses = it->second;
  return responses[std::min(call, responses.size() - 1)];
}

std::map<std::string, std::vector<std::string>> LoadScript(
    const std::string& path,
    const std::map<std::string, std::string>& id_to_task) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read script '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("script '" + path + "': " + e.what());
  }
  if (!j.is_object()) {
    throw std::runtime_error("script '" + path + "' must be a JSON object");
  }
  std::map<std::string, std::vector<std::string>> script;
  for (const auto& [key, value] : j.items()) {
    auto task = id_to_task.find(key);
    const std::string& resolved = task == id_to_task.end() ? key : task->second;
    std::vector<std::string>& out = script[resolved];
    if (value.is_string()) {
      out.push_back(value.get<std::string>());
    } else if (value.is_array()) {
      for (const auto& v : value) out.push_back(v.get<std::string>());
    } else {
      throw std::runtime_error("script entry '" + key +
                               "' must be a string or a list of strings");
    }
  }
  return script;
}

}  // namespace plansel
