#pragma once

#include <atomic>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crux/backends.hpp"
#include "crux/clustering.hpp"
#include "crux/config.hpp"
#include "crux/consistency.hpp"
#include "crux/sample_cache.hpp"
#include "crux/types.hpp"

namespace crux {

struct ConfidenceReport {
  std::string record_id;
  double entropy_with_context = 0.0;
  double entropy_context_free = 0.0;
  double delta_h = 0.0;
  double gc = 0.0;
  GcVariant gc_variant = GcVariant::kPairwise;
  std::map<std::string, double> baseline_scores;  // keyed by baseline name
  std::optional<double> fused_confidence;
  Partition partition_with_context;
  Partition partition_context_free;
  SimilarityMatrix pooled_similarity;  // with-context answers first
  AnswerSet with_context;
  AnswerSet context_free;

  // [delta_h, gc] or [delta_h] when consistency is ablated.
  std::vector<double> features(bool use_gc) const;
};

// Draws both answer sets for a record, consulting the sample cache first.
// Fresh generations are appended to the cache before they are returned.
class ContrastiveSampler {
 public:
  ContrastiveSampler(GenerationBackend& gen, SampleCache* cache) : gen_(gen), cache_(cache) {}

  AnswerSet sample(const QuestionRecord& record, Condition condition, const CruxConfig& cfg);

  std::size_t backend_calls() const { return backend_calls_.load(); }
  std::size_t cache_hits() const { return cache_hits_.load(); }

 private:
  GenerationBackend& gen_;
  SampleCache* cache_;
  std::atomic<std::size_t> backend_calls_{0};
  std::atomic<std::size_t> cache_hits_{0};
};

std::string prompt_for(const QuestionRecord& record, Condition condition, const CruxConfig& cfg);

// Confidence for one record from its two answer sets (no sampling).
ConfidenceReport score_answer_sets(const QuestionRecord& record, AnswerSet with_context,
                                   AnswerSet context_free, const CruxConfig& cfg,
                                   EntailmentBackend& nli);

// Samples both conditions (concurrently), then scores them.
ConfidenceReport run_crux(const QuestionRecord& record, const CruxConfig& cfg,
                          ContrastiveSampler& sampler, EntailmentBackend& nli);

// Convenience overload without a cache.
ConfidenceReport run_crux(const QuestionRecord& record, const CruxConfig& cfg,
                          GenerationBackend& gen, EntailmentBackend& nli);

}  // namespace crux
