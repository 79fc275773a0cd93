#pragma once

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "crux/types.hpp"

namespace crux {

struct NLIResult {
  double p_entail = 0.0;
  double p_neutral = 0.0;
  double p_contradict = 0.0;

  // Throws MalformedResponse unless all three are in [0,1] and sum to 1 ± 1e-6.
  void validate() const;
  bool operator==(const NLIResult&) const = default;
};

// Produces answers for a prompt. Implementations must be safe for concurrent
// calls.
class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;

  // Stable name used as part of the sample-cache key.
  virtual std::string identity() const = 0;

  // Validates arguments, strips whitespace, and enforces the exact-count
  // contract on top of generate().
  AnswerSet sample_answers(const std::string& prompt, int n, const DecodingParams& params,
                           Condition condition = Condition::kWithContext);

 protected:
  virtual std::vector<std::string> generate(const std::string& prompt, int n,
                                            const DecodingParams& params) = 0;
};

class EntailmentBackend {
 public:
  virtual ~EntailmentBackend() = default;

  NLIResult entailment_probs(const std::string& premise, const std::string& hypothesis);

 protected:
  virtual NLIResult classify(const std::string& premise, const std::string& hypothesis) = 0;
};

// Caps the number of simultaneous requests shared by a set of backends.
class InflightLimiter {
 public:
  explicit InflightLimiter(int max_inflight = 4);

  void acquire();
  void release();
  int max_inflight() const { return max_; }

  class Guard {
   public:
    explicit Guard(InflightLimiter* l) : limiter_(l) {
      if (limiter_) limiter_->acquire();
    }
    ~Guard() {
      if (limiter_) limiter_->release();
    }
    Guard(const Guard&) = delete;
    Guard& operator=(const Guard&) = delete;

   private:
    InflightLimiter* limiter_;
  };

 private:
  int max_;
  int in_use_ = 0;
  std::mutex mu_;
  std::condition_variable cv_;
};

// ---------------------------------------------------------------------------
// Deterministic in-process backends.

// Answers are looked up by the fingerprint of the prompt text. A script with
// fewer answers than requested is an error; extra answers are ignored.
class ScriptedGenerationBackend final : public GenerationBackend {
 public:
  ScriptedGenerationBackend() = default;
  explicit ScriptedGenerationBackend(std::map<std::string, std::vector<std::string>> by_fingerprint);

  // JSON object {"<prompt fingerprint>": ["answer", ...], ...}.
  static std::unique_ptr<ScriptedGenerationBackend> from_file(const std::filesystem::path& path);

  void add_prompt(const std::string& prompt, std::vector<std::string> answers);
  const std::map<std::string, std::vector<std::string>>& script() const { return script_; }

  // "mock:scripted:<fingerprint of the script>", so cached answers never
  // outlive a change of script.
  std::string identity() const override;
  std::size_t calls() const { return calls_.load(); }

 protected:
  std::vector<std::string> generate(const std::string& prompt, int n,
                                    const DecodingParams& params) override;

 private:
  std::map<std::string, std::vector<std::string>> script_;
  std::atomic<std::size_t> calls_{0};
};

// entail = 1 iff the normalized texts are equal, otherwise contradict = 1.
class EqualityEntailmentBackend final : public EntailmentBackend {
 public:
  std::size_t calls() const { return calls_.load(); }

 protected:
  NLIResult classify(const std::string& premise, const std::string& hypothesis) override;

 private:
  std::atomic<std::size_t> calls_{0};
};

// Exact (premise, hypothesis) lookups; pairs not in the table fall back to
// the equality rule.
class TableEntailmentBackend final : public EntailmentBackend {
 public:
  TableEntailmentBackend() = default;

  void set(const std::string& premise, const std::string& hypothesis, NLIResult r);

  // JSON array of {"premise","hypothesis","entailment","neutral","contradiction"}.
  static std::unique_ptr<TableEntailmentBackend> from_file(const std::filesystem::path& path);

 protected:
  NLIResult classify(const std::string& premise, const std::string& hypothesis) override;

 private:
  std::map<std::pair<std::string, std::string>, NLIResult> table_;
};

// Memoizes directional entailment results of another backend so that
// clustering and similarity construction share NLI calls.
class MemoizedEntailment final : public EntailmentBackend {
 public:
  explicit MemoizedEntailment(EntailmentBackend& inner) : inner_(inner) {}

  std::size_t size() const;

 protected:
  NLIResult classify(const std::string& premise, const std::string& hypothesis) override;

 private:
  EntailmentBackend& inner_;
  mutable std::mutex mu_;
  std::map<std::pair<std::string, std::string>, NLIResult> memo_;
};

}  // namespace crux
