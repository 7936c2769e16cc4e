#include "plansel/flops.h"

#include <stdexcept>
#include <string>

namespace plansel {

void FlopsScenario::Check() const {
  for (double v : {pool_size, tokens_per_example, generator_params,
                   embedder_params, embedding_dim, context_exemplars,
                   proxy_tokens, initial_random_exemplars}) {
    if (!(v > 0.0)) {
      throw std::invalid_argument("FLOPs scenario values must all be positive");
    }
  }
}

std::string_view ToString(FlopsMethod method) {
  switch (method) {
    case FlopsMethod::kBaselineAs:
      return "baseline_as";
    case FlopsMethod::kGrase:
      return "grase";
    case FlopsMethod::kGraseStar:
      return "grase_star";
    case FlopsMethod::kProxy:
      return "proxy";
    case FlopsMethod::kInferenceOnly:
      return "inference_only";
  }
  return "inference_only";
}

FlopsMethod ParseFlopsMethod(std::string_view text) {
  for (FlopsMethod m : {FlopsMethod::kBaselineAs, FlopsMethod::kGrase,
                        FlopsMethod::kGraseStar, FlopsMethod::kProxy,
                        FlopsMethod::kInferenceOnly}) {
    if (text == ToString(m)) return m;
  }
  throw std::invalid_argument(
      "unknown method '" + std::string(text) +
      "' (expected baseline_as, grase, grase_star, proxy or inference_only)");
}

FlopsBreakdown EstimateFlops(const FlopsScenario& s, FlopsMethod method) {
  s.Check();
  const double k = s.tokens_per_example;
  FlopsBreakdown b;
  b.inference = s.context_exemplars * k * s.generator_params;
  const double grase_prompt = (s.initial_random_exemplars + 1.0) * k * s.generator_params;
  switch (method) {
    case FlopsMethod::kInferenceOnly:
      break;
    case FlopsMethod::kBaselineAs:
      b.cpu_lcas = s.pool_size * k * k;
      break;
    case FlopsMethod::kGrase:
      b.selection = grase_prompt;
      b.cpu_lcas = s.pool_size * k * k;
      break;
    case FlopsMethod::kGraseStar:
      b.selection = 2.0 * grase_prompt;
      b.cpu_lcas = 2.0 * s.pool_size * k * k;
      break;
    case FlopsMethod::kProxy:
      b.preparation = s.proxy_tokens * k * s.embedder_params;
      b.selection = k * s.embedder_params + s.proxy_tokens * s.embedding_dim;
      b.cpu_lcas = s.proxy_tokens * s.pool_size * k * k;
      break;
  }
  return b;
}

}  // namespace plansel
