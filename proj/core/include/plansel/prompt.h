// Prompt assembly for in-context plan generation.
//
// Each exemplar renders as
//   Please solve the problem:{task}; Your plan as plain text without formatting:{plan}; done.
// and the test task renders as the same template cut right after
// "without formatting:". Blocks are joined with '\n'.
#ifndef PLANSEL_PROMPT_H_
#define PLANSEL_PROMPT_H_

#include <string>
#include <string_view>
#include <vector>

namespace plansel {

struct PromptExemplar {
  std::string task;
  std::string plan;
};

// Exemplars are written in the given order (callers put the most similar
// first).
std::string AssemblePrompt(const std::vector<PromptExemplar>& exemplars,
                           std::string_view test_task);

// Inverse of AssemblePrompt for prompts it produced. Throws
// std::invalid_argument on text that does not follow the template.
struct PromptParts {
  std::vector<PromptExemplar> exemplars;
  std::string test_task;
};
PromptParts ParsePrompt(std::string_view prompt);

// "sha256:<64 hex chars>".
std::string Sha256Digest(std::string_view data);

}  // namespace plansel

#endif  // PLANSEL_PROMPT_H_
