#include "crux/http_backends.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <httplib.h>

#include "crux/error.hpp"

namespace crux {

using nlohmann::json;

Endpoint Endpoint::parse(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kConfigInvalid, "URL needs a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint ep;
  ep.origin = url.substr(0, path_start);
  if (path_start != std::string::npos) ep.path_prefix = url.substr(path_start);
  while (!ep.path_prefix.empty() && ep.path_prefix.back() == '/') ep.path_prefix.pop_back();
  return ep;
}

namespace {

std::string versioned_path(const std::string& prefix, const std::string& leaf) {
  const bool has_v1 = prefix.size() >= 3 && prefix.compare(prefix.size() - 3, 3, "/v1") == 0;
  return prefix + (has_v1 ? "" : "/v1") + leaf;
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

JsonPoster::JsonPoster(Endpoint endpoint, RetryPolicy retry,
                       std::shared_ptr<InflightLimiter> limiter,
                       std::optional<std::string> bearer_token)
    : endpoint_(std::move(endpoint)),
      retry_(retry),
      limiter_(std::move(limiter)),
      bearer_(std::move(bearer_token)),
      attempts_(std::make_shared<std::atomic<std::size_t>>(0)) {}

json JsonPoster::post(const std::string& path, const json& body) const {
  const std::string payload = body.dump();
  std::string last_error;
  auto backoff = retry_.initial_backoff;
  for (int attempt = 0; attempt <= retry_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Result res;
    {
      InflightLimiter::Guard guard(limiter_.get());
      ++*attempts_;
      httplib::Client client(endpoint_.origin);
      client.set_connection_timeout(10);
      client.set_read_timeout(120);
      httplib::Headers headers;
      if (bearer_) headers.emplace("Authorization", "Bearer " + *bearer_);
      res = client.Post(path, headers, payload, "application/json");
    }
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (retryable_status(res->status)) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error(ErrorCode::kBackendUnavailable,
                  endpoint_.origin + path + " returned HTTP " + std::to_string(res->status));
    }
    try {
      return json::parse(res->body);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedResponse, "response is not JSON: " + std::string(e.what()));
    }
  }
  throw Error(ErrorCode::kBackendUnavailable,
              endpoint_.origin + path + " failed after " + std::to_string(retry_.max_retries + 1) +
                  " attempts (" + last_error + ")");
}

HttpGenerationBackend::HttpGenerationBackend(Options opts, std::shared_ptr<InflightLimiter> limiter)
    : opts_(std::move(opts)),
      poster_(Endpoint::parse(opts_.base_url), opts_.retry, std::move(limiter), opts_.api_key) {
  path_ = versioned_path(Endpoint::parse(opts_.base_url).path_prefix, "/chat/completions");
}

std::string HttpGenerationBackend::identity() const {
  return "openai-chat:" + opts_.base_url + "#" + opts_.model;
}

std::vector<std::string> HttpGenerationBackend::request(const std::string& prompt, int n,
                                                        const DecodingParams& params) const {
  json body = {
      {"model", opts_.model},
      {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", params.temperature},
      {"max_tokens", params.max_tokens},
      {"n", n},
  };
  if (params.seed) body["seed"] = *params.seed;
  const json resp = poster_.post(path_, body);
  std::vector<std::string> out;
  try {
    for (const auto& choice : resp.at("choices")) {
      const auto& content = choice.at("message").at("content");
      if (!content.is_string()) {
        throw Error(ErrorCode::kMalformedResponse, "choice content is not text");
      }
      out.push_back(content.get<std::string>());
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedResponse, "chat completion: " + std::string(e.what()));
  }
  return out;
}

std::vector<std::string> HttpGenerationBackend::generate(const std::string& prompt, int n,
                                                         const DecodingParams& params) {
  std::vector<std::string> answers;
  if (opts_.use_n_parameter) {
    answers = request(prompt, n, params);
    if (answers.size() > static_cast<std::size_t>(n)) answers.resize(n);
  }
  while (answers.size() < static_cast<std::size_t>(n)) {
    auto one = request(prompt, 1, params);
    if (one.empty()) throw Error(ErrorCode::kMalformedResponse, "chat completion had no choices");
    answers.push_back(std::move(one.front()));
  }
  return answers;
}

NLIResult nli_from_scores(double entailment, double neutral, double contradiction) {
  const double sum = entailment + neutral + contradiction;
  const bool probabilities = entailment >= 0.0 && neutral >= 0.0 && contradiction >= 0.0 &&
                             entailment <= 1.0 && neutral <= 1.0 && contradiction <= 1.0 &&
                             std::abs(sum - 1.0) <= 1e-6;
  if (probabilities) return {entailment, neutral, contradiction};
  if (!std::isfinite(sum)) throw Error(ErrorCode::kMalformedResponse, "non-finite NLI scores");
  const double mx = std::max({entailment, neutral, contradiction});
  const double e = std::exp(entailment - mx);
  const double u = std::exp(neutral - mx);
  const double c = std::exp(contradiction - mx);
  const double z = e + u + c;
  return {e / z, u / z, c / z};
}

HttpEntailmentBackend::HttpEntailmentBackend(Options opts, std::shared_ptr<InflightLimiter> limiter)
    : opts_(std::move(opts)),
      poster_(Endpoint::parse(opts_.base_url), opts_.retry, std::move(limiter)) {
  path_ = versioned_path(Endpoint::parse(opts_.base_url).path_prefix, "/nli");
}

NLIResult HttpEntailmentBackend::classify(const std::string& premise,
                                          const std::string& hypothesis) {
  const json resp = poster_.post(path_, {{"premise", premise}, {"hypothesis", hypothesis}});
  try {
    return nli_from_scores(resp.at("entailment").get<double>(), resp.at("neutral").get<double>(),
                           resp.at("contradiction").get<double>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedResponse, "NLI response: " + std::string(e.what()));
  }
}

}  // namespace crux
