#include "crux/entropy.hpp"

#include <cmath>

#include "crux/error.hpp"

namespace crux {

double entropy(const ClusterDistribution& dist) {
  if (dist.probabilities.empty()) {
    throw Error(ErrorCode::kInvalidDistribution, "empty distribution");
  }
  double sum = 0.0;
  double h = 0.0;
  for (double p : dist.probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::kInvalidDistribution, "probability outside [0,1]");
    }
    sum += p;
    if (p > 0.0) h -= p * std::log(p);
  }
  if (std::abs(sum - 1.0) > kDistributionTolerance) {
    throw Error(ErrorCode::kInvalidDistribution, "probabilities do not sum to 1");
  }
  // Rounding can leave a tiny negative value for a single-cluster distribution.
  return h > 0.0 ? h : 0.0;
}

double entropy_reduction(const ClusterDistribution& dist_context_free,
                         const ClusterDistribution& dist_with_context) {
  return entropy(dist_context_free) - entropy(dist_with_context);
}

}  // namespace crux
