// Per-test FLOPs estimate for exemplar selection and plan generation.
//
// A forward pass costs about one FLOP per parameter per token. With k tokens
// per task or plan, P generator parameters, E embedder parameters, embedding
// dimension d, pool size N, T proxy tokens, R initial random exemplars and
// |D| exemplars in the final context:
//
//   inference        |D|·k·P                  (every method)
//   grase            selection (R+1)·k·P      one extra prompt
//   grase_star       selection 2·(R+1)·k·P    one more round
//   proxy            preparation T·k·E, selection k·E + T·d
//   baseline_as      selection 0
//
// LCAS work (N·k² per query; T·N·k² to precompute the proxy matrix) runs on
// CPU and is reported separately, never added to the totals. Preparation is
// paid once per pool, so total = selection + inference.
#ifndef PLANSEL_FLOPS_H_
#define PLANSEL_FLOPS_H_

#include <string_view>

namespace plansel {

struct FlopsScenario {
  double pool_size = 1000;                 // N
  double tokens_per_example = 200;         // k
  double generator_params = 405e9;         // P
  double embedder_params = 1e9;            // E
  double embedding_dim = 768;              // d
  double context_exemplars = 10;           // |D|
  double proxy_tokens = 200;               // T
  double initial_random_exemplars = 10;    // R

  // Throws std::invalid_argument unless every field is positive.
  void Check() const;
};

enum class FlopsMethod { kBaselineAs, kGrase, kGraseStar, kProxy, kInferenceOnly };

std::string_view ToString(FlopsMethod method);
// Accepts baseline_as, grase, grase_star, proxy, inference_only.
FlopsMethod ParseFlopsMethod(std::string_view text);

struct FlopsBreakdown {
  double preparation = 0.0;
  double selection = 0.0;
  double inference = 0.0;
  double cpu_lcas = 0.0;
  double total() const { return selection + inference; }
};

FlopsBreakdown EstimateFlops(const FlopsScenario& scenario, FlopsMethod method);

}  // namespace plansel

#endif  // PLANSEL_FLOPS_H_
