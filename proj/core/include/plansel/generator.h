// Plan generators: prompt text in, response text out.
#ifndef PLANSEL_GENERATOR_H_
#define PLANSEL_GENERATOR_H_

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "plansel/pddl.h"

namespace plansel {

class GeneratorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Authentication was rejected. The message names the environment variable
// the key was read from, never the key.
class CredentialError : public GeneratorError {
 public:
  using GeneratorError::GeneratorError;
};

// Implementations must be safe to call from several threads at once.
class PlanGenerator {
 public:
  virtual ~PlanGenerator() = default;
  virtual std::string Generate(std::string_view prompt,
                               size_t max_output_tokens) = 0;
};

// Returns the reference plan of the prompt's test task verbatim, or an empty
// response for tasks without a reference.
class EchoOracleGenerator : public PlanGenerator {
 public:
  // task text -> reference plan
  explicit EchoOracleGenerator(std::map<std::string, Plan> references);
  std::string Generate(std::string_view prompt,
                       size_t max_output_tokens) override;

 private:
  std::map<std::string, Plan> references_;
};

// Succeeds iff the prompt holds at least one exemplar whose plan has action
// sequence similarity >= threshold with the test task's reference plan.
// Success returns the reference plan; failure returns the reference without
// its last step, which points the right way but misses the goal.
class ThresholdGenerator : public PlanGenerator {
 public:
  ThresholdGenerator(std::map<std::string, Plan> references, double threshold);
  std::string Generate(std::string_view prompt,
                       size_t max_output_tokens) override;

 private:
  std::map<std::string, Plan> references_;
  double threshold_;
};

// Replays canned responses. Each key (test task text) owns a list; the n-th
// call for that task returns the n-th entry, and the last entry repeats once
// the list is exhausted. Tasks without a script get an empty response.
class ScriptedGenerator : public PlanGenerator {
 public:
  explicit ScriptedGenerator(
      std::map<std::string, std::vector<std::string>> script);
  std::string Generate(std::string_view prompt,
                       size_t max_output_tokens) override;

 private:
  std::map<std::string, std::vector<std::string>> script_;
  std::mutex mutex_;
  std::map<std::string, size_t> calls_;
};

// Loads a script file: a JSON object mapping a key to a list of responses
// (or a single string). Keys found in `id_to_task` are translated to task
// text, so scripts may be keyed by test id or by task text.
std::map<std::string, std::vector<std::string>> LoadScript(
    const std::string& path, const std::map<std::string, std::string>& id_to_task);

}  // namespace plansel

#endif  // PLANSEL_GENERATOR_H_
