#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "plansel/http.h"

#include <chrono>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "plansel/logging.h"
#include "plansel/prompt.h"

namespace plansel {

namespace {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Url SplitUrl(const std::string& endpoint) {
  const size_t scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw GeneratorError("endpoint '" + endpoint + "' must start with http:// or https://");
  }
  const size_t path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

bool Retryable(int status) { return status == 429 || status >= 500; }

// Posts `body` with retries; returns the parsed JSON response.
nlohmann::json PostJson(const HttpEndpointConfig& config,
                        const nlohmann::json& body, const std::string& what) {
  const Url url = SplitUrl(config.endpoint);
  const std::string payload = body.dump();
  const std::string request_digest = Sha256Digest(payload);
  httplib::Headers headers;
  if (const char* key = std::getenv(config.api_key_env.c_str());
      key != nullptr && *key != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  const auto timeout = std::chrono::duration<double>(config.timeout_seconds);
  std::string last_error;
  const size_t attempts = config.retries + 1;
  for (size_t attempt = 1; attempt <= attempts; ++attempt) {
    if (attempt > 1 && config.retry_backoff_ms > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(
          config.retry_backoff_ms << std::min<size_t>(attempt - 2, 6)));
    }
    httplib::Client client(url.origin);
    client.set_connection_timeout(
        std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(
        std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_write_timeout(
        std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    Log(LogLevel::kDebug, what + " request " + request_digest + " attempt " +
                              std::to_string(attempt));
    const httplib::Result res =
        client.Post(url.path, headers, payload, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      Log(LogLevel::kWarning, what + " transport error on attempt " +
                                  std::to_string(attempt) + ": " + last_error);
      continue;
    }
    Log(LogLevel::kDebug, what + " response status " +
                              std::to_string(res->status) + " " +
                              Sha256Digest(res->body));
    if (res->status == 401 || res->status == 403) {
      throw CredentialError(what + " rejected credentials (HTTP " +
                            std::to_string(res->status) +
                            "); check the API key in environment variable " +
                            config.api_key_env);
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      if (Retryable(res->status)) continue;
      throw GeneratorError(what + " failed: " + last_error);
    }
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception&) {
      throw GeneratorError(what + " returned a non-JSON body " +
                           Sha256Digest(res->body));
    }
  }
  throw GeneratorError(what + " failed after " + std::to_string(attempts) +
                       " attempts: " + last_error);
}

}  // namespace

HttpGenerator::HttpGenerator(HttpEndpointConfig config)
    : config_(std::move(config)) {
  SplitUrl(config_.endpoint);
}

std::string HttpGenerator::Generate(std::string_view prompt,
                                    size_t max_output_tokens) {
  nlohmann::json body = {{"model", config_.model},
                         {"prompt", std::string(prompt)},
                         {"max_tokens", max_output_tokens},
                         {"temperature", 0}};
  const nlohmann::json res = PostJson(config_, body, "generator");
  if (res.contains("choices") && res["choices"].is_array() &&
      !res["choices"].empty()) {
    const auto& choice = res["choices"][0];
    if (choice.contains("text") && choice["text"].is_string()) {
      return choice["text"].get<std::string>();
    }
    if (choice.contains("message") && choice["message"].contains("content")) {
      return choice["message"]["content"].get<std::string>();
    }
  }
  for (const char* field : {"text", "completion"}) {
    if (res.contains(field) && res[field].is_string()) {
      return res[field].get<std::string>();
    }
  }
  throw GeneratorError("generator response has no completion text");
}

HttpEmbedder::HttpEmbedder(HttpEndpointConfig config, size_t dimension)
    : config_(std::move(config)), dimension_(dimension) {
  SplitUrl(config_.endpoint);
}

std::vector<double> HttpEmbedder::Embed(std::string_view text) const {
  const nlohmann::json res =
      PostJson(config_, {{"model", config_.model}, {"input", std::string(text)}},
               "embedder");
  const nlohmann::json* vec = nullptr;
  if (res.contains("data") && res["data"].is_array() && !res["data"].empty() &&
      res["data"][0].contains("embedding")) {
    vec = &res["data"][0]["embedding"];
  } else if (res.contains("embedding")) {
    vec = &res["embedding"];
  }
  if (vec == nullptr || !vec->is_array()) {
    throw EmbedderError("embedder response has no embedding array");
  }
  std::vector<double> out = vec->get<std::vector<double>>();
  if (out.size() != dimension_) {
    throw EmbedderError("embedder returned " + std::to_string(out.size()) +
                        " dimensions, expected " + std::to_string(dimension_));
  }
  NormalizeInPlace(&out);
  return out;
}

std::string HttpEmbedder::Fingerprint() const {
  return "http/" + config_.endpoint + "/" + config_.model +
         "/dim=" + std::to_string(dimension_);
}

}  // namespace plansel
