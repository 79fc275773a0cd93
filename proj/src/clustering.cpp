#include "crux/clustering.hpp"

#include <unordered_map>

#include "crux/error.hpp"
#include "crux/text.hpp"

namespace crux {

std::size_t Partition::total() const {
  std::size_t t = 0;
  for (const auto& c : clusters) t += c.size();
  return t;
}

void Partition::validate(std::size_t expected_total) const {
  std::vector<bool> seen(expected_total, false);
  std::size_t count = 0;
  for (const auto& c : clusters) {
    if (c.empty()) throw Error(ErrorCode::kConfigInvalid, "partition has an empty cluster");
    for (std::size_t idx : c) {
      if (idx >= expected_total || seen[idx]) {
        throw Error(ErrorCode::kConfigInvalid, "partition is not a disjoint cover");
      }
      seen[idx] = true;
      ++count;
    }
  }
  if (count != expected_total) {
    throw Error(ErrorCode::kConfigInvalid, "partition does not cover every answer");
  }
}

std::string contextualize(std::string_view query, std::string_view answer) {
  if (query.empty()) return std::string(answer);
  std::string s = "Q: ";
  s.append(query);
  s.append(" A: ");
  s.append(answer);
  return s;
}

bool bidirectional_entails(const std::string& a, const std::string& b, EntailmentBackend& nli,
                           double threshold) {
  if (nli.entailment_probs(a, b).p_entail < threshold) return false;
  return nli.entailment_probs(b, a).p_entail >= threshold;
}

Partition cluster_answers(const std::vector<std::string>& answers, EntailmentBackend& nli,
                          double threshold, std::string_view query) {
  if (answers.empty()) throw Error(ErrorCode::kConfigInvalid, "cannot cluster an empty answer set");
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kConfigInvalid, "entailment threshold must lie in (0,1]");
  }
  std::vector<std::string> texts;
  texts.reserve(answers.size());
  for (const auto& a : answers) texts.push_back(contextualize(query, a));

  Partition p;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    bool placed = false;
    for (auto& cluster : p.clusters) {
      if (bidirectional_entails(texts[cluster.front()], texts[i], nli, threshold)) {
        cluster.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) p.clusters.push_back({i});
  }
  return p;
}

Partition cluster_answers(const AnswerSet& answers, EntailmentBackend& nli, double threshold,
                          std::string_view query) {
  return cluster_answers(answers.answers, nli, threshold, query);
}

Partition cluster_exact(const std::vector<std::string>& answers) {
  Partition p;
  std::unordered_map<std::string, std::size_t> by_text;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    auto [it, inserted] = by_text.try_emplace(normalize_answer(answers[i]), p.clusters.size());
    if (inserted) {
      p.clusters.push_back({i});
    } else {
      p.clusters[it->second].push_back(i);
    }
  }
  return p;
}

ClusterDistribution cluster_distribution(const Partition& p, std::size_t total) {
  if (total == 0) throw Error(ErrorCode::kZeroTotal, "cluster distribution over zero answers");
  if (p.total() != total) {
    throw Error(ErrorCode::kConfigInvalid, "total does not match the number of clustered answers");
  }
  ClusterDistribution d;
  d.probabilities.reserve(p.size());
  for (const auto& c : p.clusters) {
    d.probabilities.push_back(static_cast<double>(c.size()) / static_cast<double>(total));
  }
  return d;
}

}  // namespace crux
