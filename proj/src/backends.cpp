#include "crux/backends.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "crux/error.hpp"
#include "crux/text.hpp"

namespace crux {

using nlohmann::json;

void NLIResult::validate() const {
  for (double p : {p_entail, p_neutral, p_contradict}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::kMalformedResponse, "NLI probability outside [0,1]");
    }
  }
  if (std::abs(p_entail + p_neutral + p_contradict - 1.0) > 1e-6) {
    throw Error(ErrorCode::kMalformedResponse, "NLI probabilities do not sum to 1");
  }
}

AnswerSet GenerationBackend::sample_answers(const std::string& prompt, int n,
                                            const DecodingParams& params, Condition condition) {
  if (n < 1) throw Error(ErrorCode::kConfigInvalid, "sample count must be >= 1");
  if (prompt.empty()) throw Error(ErrorCode::kConfigInvalid, "prompt must be non-empty");
  params.validate();

  std::vector<std::string> raw = generate(prompt, n, params);
  if (raw.size() != static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::kMalformedResponse,
                "backend returned " + std::to_string(raw.size()) + " answers, expected " +
                    std::to_string(n));
  }
  AnswerSet set;
  set.condition = condition;
  set.decoding = params;
  set.prompt_fingerprint = fingerprint(prompt);
  set.answers.reserve(raw.size());
  for (const auto& a : raw) set.answers.push_back(trim(a));
  return set;
}

NLIResult EntailmentBackend::entailment_probs(const std::string& premise,
                                              const std::string& hypothesis) {
  if (premise.empty() || hypothesis.empty()) {
    throw Error(ErrorCode::kConfigInvalid, "entailment inputs must be non-empty");
  }
  NLIResult r = classify(premise, hypothesis);
  r.validate();
  return r;
}

InflightLimiter::InflightLimiter(int max_inflight) : max_(max_inflight) {
  if (max_ < 1) throw Error(ErrorCode::kConfigInvalid, "max_inflight must be >= 1");
}

void InflightLimiter::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return in_use_ < max_; });
  ++in_use_;
}

void InflightLimiter::release() {
  {
    std::lock_guard lock(mu_);
    --in_use_;
  }
  cv_.notify_one();
}

ScriptedGenerationBackend::ScriptedGenerationBackend(
    std::map<std::string, std::vector<std::string>> by_fingerprint)
    : script_(std::move(by_fingerprint)) {}

std::unique_ptr<ScriptedGenerationBackend> ScriptedGenerationBackend::from_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFileUnreadable, "cannot open script " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaMismatch, "generation script: " + std::string(e.what()));
  }
  if (!j.is_object()) throw Error(ErrorCode::kSchemaMismatch, "generation script must be an object");
  std::map<std::string, std::vector<std::string>> script;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_array()) throw Error(ErrorCode::kSchemaMismatch, "script entry must be an array");
    script[key] = value.get<std::vector<std::string>>();
  }
  return std::make_unique<ScriptedGenerationBackend>(std::move(script));
}

void ScriptedGenerationBackend::add_prompt(const std::string& prompt,
                                           std::vector<std::string> answers) {
  script_[fingerprint(prompt)] = std::move(answers);
}

std::string ScriptedGenerationBackend::identity() const {
  return "mock:scripted:" + fingerprint(json(script_).dump());
}

std::vector<std::string> ScriptedGenerationBackend::generate(const std::string& prompt, int n,
                                                             const DecodingParams&) {
  ++calls_;
  auto it = script_.find(fingerprint(prompt));
  if (it == script_.end()) {
    throw Error(ErrorCode::kBackendUnavailable, "no scripted answers for prompt " + fingerprint(prompt));
  }
  if (it->second.size() < static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::kMalformedResponse, "script holds fewer answers than requested");
  }
  return {it->second.begin(), it->second.begin() + n};
}

NLIResult EqualityEntailmentBackend::classify(const std::string& premise,
                                              const std::string& hypothesis) {
  ++calls_;
  if (normalize_answer(premise) == normalize_answer(hypothesis)) return {1.0, 0.0, 0.0};
  return {0.0, 0.0, 1.0};
}

void TableEntailmentBackend::set(const std::string& premise, const std::string& hypothesis,
                                 NLIResult r) {
  r.validate();
  table_[{premise, hypothesis}] = r;
}

std::unique_ptr<TableEntailmentBackend> TableEntailmentBackend::from_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFileUnreadable, "cannot open NLI table " + path.string());
  auto backend = std::make_unique<TableEntailmentBackend>();
  try {
    json j;
    in >> j;
    for (const auto& e : j) {
      backend->set(e.at("premise").get<std::string>(), e.at("hypothesis").get<std::string>(),
                   {e.at("entailment").get<double>(), e.at("neutral").get<double>(),
                    e.at("contradiction").get<double>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaMismatch, "NLI table: " + std::string(e.what()));
  }
  return backend;
}

NLIResult TableEntailmentBackend::classify(const std::string& premise,
                                           const std::string& hypothesis) {
  auto it = table_.find({premise, hypothesis});
  if (it != table_.end()) return it->second;
  if (normalize_answer(premise) == normalize_answer(hypothesis)) return {1.0, 0.0, 0.0};
  return {0.0, 0.0, 1.0};
}

std::size_t MemoizedEntailment::size() const {
  std::lock_guard lock(mu_);
  return memo_.size();
}

NLIResult MemoizedEntailment::classify(const std::string& premise, const std::string& hypothesis) {
  {
    std::lock_guard lock(mu_);
    auto it = memo_.find({premise, hypothesis});
    if (it != memo_.end()) return it->second;
  }
  NLIResult r = inner_.entailment_probs(premise, hypothesis);
  std::lock_guard lock(mu_);
  memo_.emplace(std::pair{premise, hypothesis}, r);
  return r;
}

}  // namespace crux
