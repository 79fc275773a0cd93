#pragma once

#include "crux/clustering.hpp"

namespace crux {

inline constexpr double kDistributionTolerance = 1e-9;

// Shannon entropy in nats, with 0 ln 0 := 0. Throws InvalidDistribution if
// any probability is negative or the sum is off by more than 1e-9.
double entropy(const ClusterDistribution& dist);

// H(context-free) - H(with-context). Positive when the context concentrates
// the answers; negative values are legal.
double entropy_reduction(const ClusterDistribution& dist_context_free,
                         const ClusterDistribution& dist_with_context);

}  // namespace crux
