#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "crux/backends.hpp"
#include "crux/types.hpp"

namespace crux {

// Semantic clusters over the indices of one answer set. Each cluster lists
// its members in generation order; the first member is the representative.
struct Partition {
  std::vector<std::vector<std::size_t>> clusters;

  std::size_t size() const { return clusters.size(); }
  std::size_t representative(std::size_t k) const { return clusters.at(k).front(); }
  std::size_t total() const;

  // Throws ConfigInvalid unless clusters are non-empty, disjoint, and cover
  // exactly 0..total-1.
  void validate(std::size_t total) const;
};

struct ClusterDistribution {
  std::vector<double> probabilities;
};

// "Q: <query> A: <answer>", or the bare answer when query is empty.
std::string contextualize(std::string_view query, std::string_view answer);

bool bidirectional_entails(const std::string& a, const std::string& b, EntailmentBackend& nli,
                           double threshold);

// Greedy single pass in generation order: each answer joins the first
// cluster whose representative it bidirectionally entails, otherwise it
// opens a new cluster. Texts are contextualized with `query` when non-empty.
Partition cluster_answers(const std::vector<std::string>& answers, EntailmentBackend& nli,
                          double threshold, std::string_view query = {});
Partition cluster_answers(const AnswerSet& answers, EntailmentBackend& nli, double threshold,
                          std::string_view query = {});

// Two answers share a cluster iff their normalized texts are byte-identical.
Partition cluster_exact(const std::vector<std::string>& answers);

ClusterDistribution cluster_distribution(const Partition& p, std::size_t total);

}  // namespace crux
