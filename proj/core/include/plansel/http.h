// HTTP-backed generator and embedder.
//
// The API key is read from an environment variable at call time and sent as
// a bearer token; it never appears in configuration, logs or error messages.
// Requests and responses are logged at digest granularity only.
#ifndef PLANSEL_HTTP_H_
#define PLANSEL_HTTP_H_

#include <string>

#include "plansel/embedder.h"
#include "plansel/generator.h"

namespace plansel {

struct HttpEndpointConfig {
  // http://host[:port]/path or https://host[:port]/path
  std::string endpoint;
  std::string model;
  double timeout_seconds = 60.0;
  // Extra attempts after the first for transport errors, timeouts, 429 and
  // 5xx responses.
  size_t retries = 2;
  size_t retry_backoff_ms = 500;
  std::string api_key_env = "PLANSEL_API_KEY";
};

// POSTs {"model", "prompt", "max_tokens", "temperature": 0} and reads
// choices[0].text (or a top-level "text"/"completion" field).
class HttpGenerator : public PlanGenerator {
 public:
  explicit HttpGenerator(HttpEndpointConfig config);
  std::string Generate(std::string_view prompt,
                       size_t max_output_tokens) override;

 private:
  HttpEndpointConfig config_;
};

// POSTs {"model", "input"} and reads data[0].embedding (or a top-level
// "embedding" array).
class HttpEmbedder : public Embedder {
 public:
  HttpEmbedder(HttpEndpointConfig config, size_t dimension);
  size_t dimension() const override { return dimension_; }
  std::vector<double> Embed(std::string_view text) const override;
  std::string Fingerprint() const override;

 private:
  HttpEndpointConfig config_;
  size_t dimension_;
};

}  // namespace plansel

#endif  // PLANSEL_HTTP_H_
