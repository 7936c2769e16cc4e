#include "plansel/prompt.h"

#include <openssl/evp.h>

#include <memory>
#include <stdexcept>

namespace plansel {

namespace {

constexpr std::string_view kTaskPrefix = "Please solve the problem:";
constexpr std::string_view kPlanPrefix =
    "; Your plan as plain text without formatting:";
constexpr std::string_view kDone = "; done.";

}  // namespace

std::string AssemblePrompt(const std::vector<PromptExemplar>& exemplars,
                           std::string_view test_task) {
  std::string out;
  for (const PromptExemplar& e : exemplars) {
    out.append(kTaskPrefix).append(e.task).append(kPlanPrefix);
    out.append(e.plan).append(kDone).push_back('\n');
  }
  out.append(kTaskPrefix).append(test_task).append(kPlanPrefix);
  return out;
}

PromptParts ParsePrompt(std::string_view prompt) {
  PromptParts parts;
  // Block boundaries are "; done.\nPlease solve the problem:"; the test block
  // is the remainder and ends with the plan prefix.
  const std::string separator =
      std::string(kDone) + "\n" + std::string(kTaskPrefix);
  if (prompt.substr(0, kTaskPrefix.size()) != kTaskPrefix) {
    throw std::invalid_argument("prompt does not start with the task prefix");
  }
  size_t pos = kTaskPrefix.size();
  while (true) {
    const size_t next = prompt.find(separator, pos);
    if (next == std::string_view::npos) break;
    const std::string_view block = prompt.substr(pos, next - pos);
    const size_t split = block.find(kPlanPrefix);
    if (split == std::string_view::npos) {
      throw std::invalid_argument("exemplar block without a plan slot");
    }
    parts.exemplars.push_back(
        {std::string(block.substr(0, split)),
         std::string(block.substr(split + kPlanPrefix.size()))});
    pos = next + separator.size();
  }
  const std::string_view rest = prompt.substr(pos);
  if (rest.size() < kPlanPrefix.size() ||
      rest.substr(rest.size() - kPlanPrefix.size()) != kPlanPrefix) {
    throw std::invalid_argument("test block does not end with the plan slot");
  }
  parts.test_task = std::string(rest.substr(0, rest.size() - kPlanPrefix.size()));
  return parts;
}

std::string Sha256Digest(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md, &len) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "sha256:";
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

}  // namespace plansel
