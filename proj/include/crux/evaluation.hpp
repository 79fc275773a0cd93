#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "crux/backends.hpp"
#include "crux/types.hpp"

namespace crux {

struct CorrectnessLabel {
  int value = 0;
  std::size_t votes_for = 0;
  std::size_t votes_total = 0;
};

// Each generation votes correct iff p_entail(reference -> generation) beats
// p_contradict; the record is correct on a strict majority, so an even split
// is incorrect.
CorrectnessLabel label_record(const AnswerSet& generations, const std::string& reference,
                              EntailmentBackend& nli);

// Mann-Whitney estimate via midranks: P(score_pos > score_neg) + 0.5 P(tie).
double auroc(const std::vector<double>& scores, const std::vector<int>& labels);

struct RocCurve {
  std::vector<std::pair<double, double>> points;  // (fpr, tpr), from (0,0) to (1,1)
  double auroc = 0.0;                             // trapezoidal area under points
};

// Sweeps thresholds over the distinct scores in descending order.
RocCurve roc_points(const std::vector<double>& scores, const std::vector<int>& labels);

double trapezoidal_area(const std::vector<std::pair<double, double>>& points);

}  // namespace crux
