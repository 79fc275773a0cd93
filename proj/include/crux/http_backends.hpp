#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "crux/backends.hpp"

namespace crux {

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
};

// "http://host:port/prefix" split into the origin handed to the HTTP client
// and the path prefix prepended to every request path.
struct Endpoint {
  std::string origin;
  std::string path_prefix;

  static Endpoint parse(const std::string& url);
};

// POSTs a JSON body and returns the parsed JSON response, retrying transport
// failures, 429 and 5xx with exponential backoff. Other 4xx are not retried.
class JsonPoster {
 public:
  JsonPoster(Endpoint endpoint, RetryPolicy retry, std::shared_ptr<InflightLimiter> limiter,
             std::optional<std::string> bearer_token = std::nullopt);

  nlohmann::json post(const std::string& path, const nlohmann::json& body) const;

  // Number of HTTP attempts made, including retries.
  std::size_t attempts() const { return *attempts_; }

 private:
  Endpoint endpoint_;
  RetryPolicy retry_;
  std::shared_ptr<InflightLimiter> limiter_;
  std::optional<std::string> bearer_;
  std::shared_ptr<std::atomic<std::size_t>> attempts_;
};

// OpenAI-compatible chat completions: POST <base>/v1/chat/completions with
// {model, messages, temperature, max_tokens, n[, seed]}; answers are read
// from choices[i].message.content. When the server returns fewer choices
// than requested the remainder is fetched with sequential n=1 calls.
class HttpGenerationBackend final : public GenerationBackend {
 public:
  struct Options {
    std::string base_url;
    std::optional<std::string> api_key;
    std::string model = "default";
    bool use_n_parameter = true;
    RetryPolicy retry;
  };

  HttpGenerationBackend(Options opts, std::shared_ptr<InflightLimiter> limiter);

  std::string identity() const override;
  const JsonPoster& poster() const { return poster_; }

 protected:
  std::vector<std::string> generate(const std::string& prompt, int n,
                                    const DecodingParams& params) override;

 private:
  std::vector<std::string> request(const std::string& prompt, int n,
                                   const DecodingParams& params) const;

  Options opts_;
  JsonPoster poster_;
  std::string path_;
};

// POST <base>/v1/nli with {premise, hypothesis}; response
// {entailment, neutral, contradiction}. Values that already form a
// probability triple are used as-is, anything else is treated as logits and
// passed through a softmax.
class HttpEntailmentBackend final : public EntailmentBackend {
 public:
  struct Options {
    std::string base_url;
    RetryPolicy retry;
  };

  HttpEntailmentBackend(Options opts, std::shared_ptr<InflightLimiter> limiter);

  const JsonPoster& poster() const { return poster_; }

 protected:
  NLIResult classify(const std::string& premise, const std::string& hypothesis) override;

 private:
  Options opts_;
  JsonPoster poster_;
  std::string path_;
};

// Maps a 3-class response to probabilities (see HttpEntailmentBackend).
NLIResult nli_from_scores(double entailment, double neutral, double contradiction);

}  // namespace crux
