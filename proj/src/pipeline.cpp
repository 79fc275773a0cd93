#include "crux/pipeline.hpp"

#include <future>
#include <numeric>

#include "crux/baselines.hpp"
#include "crux/entropy.hpp"
#include "crux/error.hpp"
#include "crux/fusion.hpp"
#include "crux/text.hpp"

namespace crux {

std::vector<double> ConfidenceReport::features(bool use_gc) const {
  if (use_gc) return {delta_h, gc};
  return {delta_h};
}

std::string prompt_for(const QuestionRecord& record, Condition condition, const CruxConfig& cfg) {
  if (condition == Condition::kWithContext) {
    return build_prompt(record.query, record.context, cfg.templates);
  }
  return build_prompt(record.query, std::nullopt, cfg.templates);
}

AnswerSet ContrastiveSampler::sample(const QuestionRecord& record, Condition condition,
                                     const CruxConfig& cfg) {
  const std::string prompt = prompt_for(record, condition, cfg);
  CacheKey key{record.id, condition, fingerprint(prompt), cfg.decoding, gen_.identity()};
  if (cache_) {
    if (auto hit = cache_->lookup(key); hit && hit->answers.size() == static_cast<std::size_t>(cfg.n)) {
      ++cache_hits_;
      return *hit;
    }
  }
  ++backend_calls_;
  AnswerSet set = gen_.sample_answers(prompt, cfg.n, cfg.decoding, condition);
  if (cache_) cache_->append({key, set.answers, utc_timestamp()});
  return set;
}

namespace {

void require_answers(const AnswerSet& set, std::size_t n) {
  if (set.answers.size() != n) {
    throw Error(ErrorCode::kConfigInvalid, std::string(to_string(set.condition)) +
                                               " answer set has the wrong size");
  }
  for (const auto& a : set.answers) {
    if (!trim(a).empty()) return;
  }
  throw Error(ErrorCode::kEmptyAnswer,
              std::string(to_string(set.condition)) + " answers are all empty");
}

void check_record(const QuestionRecord& record) {
  if (record.query.empty()) throw Error(ErrorCode::kConfigInvalid, "record has an empty query");
  if (record.context_free || record.context.empty()) {
    throw Error(ErrorCode::kConfigInvalid,
                "record " + record.id + " has no context; confidence needs contextual input");
  }
}

std::vector<std::size_t> first_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

}  // namespace

ConfidenceReport score_answer_sets(const QuestionRecord& record, AnswerSet with_context,
                                   AnswerSet context_free, const CruxConfig& cfg,
                                   EntailmentBackend& nli) {
  cfg.validate();
  check_record(record);
  const auto n = static_cast<std::size_t>(cfg.n);
  require_answers(with_context, n);
  require_answers(context_free, n);

  MemoizedEntailment memo(nli);
  ConfidenceReport r;
  r.record_id = record.id;
  r.gc_variant = cfg.gc_variant;

  // Stage 1: partitions, then entropy reduction over the same clusters.
  if (cfg.use_clustering) {
    r.partition_with_context =
        cluster_answers(with_context.answers, memo, cfg.entail_threshold, record.query);
    r.partition_context_free =
        cluster_answers(context_free.answers, memo, cfg.entail_threshold, record.query);
  } else {
    r.partition_with_context = cluster_exact(with_context.answers);
    r.partition_context_free = cluster_exact(context_free.answers);
  }
  const auto dist_cq = cluster_distribution(r.partition_with_context, n);
  const auto dist_q = cluster_distribution(r.partition_context_free, n);
  r.entropy_with_context = entropy(dist_cq);
  r.entropy_context_free = entropy(dist_q);
  r.delta_h = entropy_reduction(dist_q, dist_cq);

  // Stage 2: similarity graph over the pooled 2n answers.
  std::vector<std::string> pooled;
  pooled.reserve(2 * n);
  for (const auto& a : with_context.answers) pooled.push_back(contextualize(record.query, a));
  for (const auto& a : context_free.answers) pooled.push_back(contextualize(record.query, a));
  r.pooled_similarity = build_similarity_matrix(pooled, memo);
  r.gc = global_consistency(r.pooled_similarity, cfg.gc_variant);

  const SimilarityMatrix graph = cfg.baseline_graph == BaselineGraph::kPooled
                                     ? r.pooled_similarity
                                     : r.pooled_similarity.submatrix(first_indices(n));
  BaselineInputs inputs{&graph, &r.partition_with_context, &with_context.answers};
  for (auto kind : kAllBaselines) {
    r.baseline_scores[std::string(to_string(kind))] = baseline_score(kind, inputs);
  }

  // Stage 3: fusion head.
  if (cfg.fusion) {
    const auto v = r.features(cfg.use_gc);
    if (cfg.fusion->features != v.size()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "fusion head expects " + std::to_string(cfg.fusion->features) +
                      " features but the configuration produces " + std::to_string(v.size()));
    }
    r.fused_confidence = mlp_forward(v, *cfg.fusion);
  }

  r.with_context = std::move(with_context);
  r.context_free = std::move(context_free);
  return r;
}

ConfidenceReport run_crux(const QuestionRecord& record, const CruxConfig& cfg,
                          ContrastiveSampler& sampler, EntailmentBackend& nli) {
  cfg.validate();
  check_record(record);
  auto context_free = std::async(std::launch::async, [&] {
    return sampler.sample(record, Condition::kContextFree, cfg);
  });
  AnswerSet with_context = sampler.sample(record, Condition::kWithContext, cfg);
  return score_answer_sets(record, std::move(with_context), context_free.get(), cfg, nli);
}

ConfidenceReport run_crux(const QuestionRecord& record, const CruxConfig& cfg,
                          GenerationBackend& gen, EntailmentBackend& nli) {
  ContrastiveSampler sampler(gen, nullptr);
  return run_crux(record, cfg, sampler, nli);
}

}  // namespace crux
