#include "crux/evaluation.hpp"

#include <algorithm>
#include <numeric>

#include "crux/error.hpp"

namespace crux {

CorrectnessLabel label_record(const AnswerSet& generations, const std::string& reference,
                              EntailmentBackend& nli) {
  if (reference.empty()) throw Error(ErrorCode::kConfigInvalid, "reference answer is empty");
  if (generations.condition != Condition::kWithContext) {
    throw Error(ErrorCode::kConfigInvalid, "labels come from with-context generations");
  }
  CorrectnessLabel label;
  for (const auto& g : generations.answers) {
    ++label.votes_total;
    if (g.empty()) continue;
    const NLIResult r = nli.entailment_probs(reference, g);
    if (r.p_entail > r.p_contradict) ++label.votes_for;
  }
  label.value = 2 * label.votes_for > label.votes_total ? 1 : 0;
  return label;
}

namespace {

void check_inputs(const std::vector<double>& scores, const std::vector<int>& labels,
                  std::size_t* positives) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "scores and labels differ in length");
  }
  std::size_t pos = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw Error(ErrorCode::kConfigInvalid, "labels must be 0/1");
    pos += static_cast<std::size_t>(l);
  }
  if (pos == 0 || pos == labels.size()) {
    throw Error(ErrorCode::kSingleClass, "AUROC needs both classes");
  }
  *positives = pos;
}

std::vector<std::size_t> order_by_score(const std::vector<double>& scores, bool descending) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return descending ? scores[a] > scores[b] : scores[a] < scores[b];
  });
  return order;
}

}  // namespace

double auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
  std::size_t n_pos = 0;
  check_inputs(scores, labels, &n_pos);
  const std::size_t n = scores.size();
  const std::size_t n_neg = n - n_pos;

  // Rank-sum of positives with midranks for tied groups, in half-rank units
  // so everything stays integral.
  const auto order = order_by_score(scores, false);
  unsigned long long twice_rank_sum = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const unsigned long long twice_mid = (i + 1) + (j + 1);  // ranks are 1-based
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1) twice_rank_sum += twice_mid;
    }
    i = j + 1;
  }
  // U = R_pos - n_pos (n_pos + 1) / 2
  const unsigned long long twice_u =
      twice_rank_sum - static_cast<unsigned long long>(n_pos) * (n_pos + 1);
  return static_cast<double>(twice_u) /
         (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double trapezoidal_area(const std::vector<std::pair<double, double>>& points) {
  double area = 0.0;
  for (std::size_t k = 1; k < points.size(); ++k) {
    area += (points[k].first - points[k - 1].first) * (points[k].second + points[k - 1].second) / 2.0;
  }
  return area;
}

RocCurve roc_points(const std::vector<double>& scores, const std::vector<int>& labels) {
  std::size_t n_pos = 0;
  check_inputs(scores, labels, &n_pos);
  const std::size_t n = scores.size();
  const double pos = static_cast<double>(n_pos);
  const double neg = static_cast<double>(n - n_pos);

  RocCurve curve;
  curve.points.emplace_back(0.0, 0.0);
  const auto order = order_by_score(scores, true);
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t i = 0;
  while (i < n) {
    const double threshold = scores[order[i]];
    while (i < n && scores[order[i]] == threshold) {
      if (labels[order[i]] == 1) {
        ++tp;
      } else {
        ++fp;
      }
      ++i;
    }
    curve.points.emplace_back(static_cast<double>(fp) / neg, static_cast<double>(tp) / pos);
  }
  curve.auroc = trapezoidal_area(curve.points);
  return curve;
}

}  // namespace crux
