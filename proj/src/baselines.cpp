#include "crux/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "crux/error.hpp"
#include "crux/spectral.hpp"
#include "crux/text.hpp"

namespace crux {

std::string_view to_string(BaselineKind k) {
  switch (k) {
    case BaselineKind::kDegreeMatrix: return "degree_matrix";
    case BaselineKind::kEccentricity: return "eccentricity";
    case BaselineKind::kEigValLaplacian: return "eigval_laplacian";
    case BaselineKind::kNumSemSets: return "num_sem_sets";
    case BaselineKind::kRougeL: return "rouge_l";
    case BaselineKind::kBleu: return "bleu";
  }
  return "unknown";
}

BaselineKind baseline_from_string(std::string_view s) {
  for (auto k : kAllBaselines) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::kConfigInvalid, "unknown baseline '" + std::string(s) + "'");
}

double degree_matrix_score(const SimilarityMatrix& w) {
  w.validate();
  double trace = 0.0;
  for (double x : w.data()) trace += x;
  const double m = static_cast<double>(w.size());
  return trace / (m * m);
}

double eigval_laplacian_score(const SimilarityMatrix& w) {
  double s = 0.0;
  for (double lambda : laplacian_eigenvalues(w)) s += std::max(0.0, 1.0 - lambda);
  return -s + 0.0;
}

double eccentricity_score(const SimilarityMatrix& w) {
  const SymmetricEigen eig = laplacian_eigen(w);
  const std::size_t m = eig.m;
  const std::size_t k = std::min<std::size_t>(m, 5);
  double norm2 = 0.0;
  for (std::size_t col = 0; col < k; ++col) {
    double mean = 0.0;
    for (std::size_t row = 0; row < m; ++row) mean += eig.vector_entry(row, col);
    mean /= static_cast<double>(m);
    for (std::size_t row = 0; row < m; ++row) {
      const double c = eig.vector_entry(row, col) - mean;
      norm2 += c * c;
    }
  }
  return -std::sqrt(norm2) + 0.0;
}

double num_sem_sets_score(const Partition& p) { return -static_cast<double>(p.size()); }

double baseline_score(BaselineKind kind, const BaselineInputs& in) {
  auto need = [&](const void* ptr, const char* what) {
    if (!ptr) {
      throw Error(ErrorCode::kMissingInput,
                  std::string(to_string(kind)) + " needs " + what);
    }
  };
  switch (kind) {
    case BaselineKind::kDegreeMatrix:
      need(in.similarity, "a similarity matrix");
      return degree_matrix_score(*in.similarity);
    case BaselineKind::kEccentricity:
      need(in.similarity, "a similarity matrix");
      return eccentricity_score(*in.similarity);
    case BaselineKind::kEigValLaplacian:
      need(in.similarity, "a similarity matrix");
      return eigval_laplacian_score(*in.similarity);
    case BaselineKind::kNumSemSets:
      need(in.partition, "a partition");
      return num_sem_sets_score(*in.partition);
    case BaselineKind::kRougeL:
      need(in.answers, "an answer set");
      return mean_pairwise_rouge_l(*in.answers);
    case BaselineKind::kBleu:
      need(in.answers, "an answer set");
      return mean_pairwise_bleu(*in.answers);
  }
  throw Error(ErrorCode::kMissingInput, "unknown baseline");
}

namespace {

std::vector<std::string> tokens_of(std::string_view text) {
  return split_whitespace(normalize_answer(text));
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts ngrams(const std::vector<std::string>& toks, std::size_t n) {
  NgramCounts out;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    ++out[std::vector<std::string>(toks.begin() + i, toks.begin() + i + n)];
  }
  return out;
}

}  // namespace

double rouge_l_f1(std::string_view a, std::string_view b) {
  const auto ta = tokens_of(a);
  const auto tb = tokens_of(b);
  if (ta.empty() || tb.empty()) return ta.empty() && tb.empty() ? 1.0 : 0.0;
  const double lcs = static_cast<double>(lcs_length(ta, tb));
  if (lcs == 0.0) return 0.0;
  const double p = lcs / static_cast<double>(ta.size());
  const double r = lcs / static_cast<double>(tb.size());
  return 2.0 * p * r / (p + r);
}

double sentence_bleu(std::string_view candidate, std::string_view reference) {
  constexpr std::size_t kMaxOrder = 4;
  const auto cand = tokens_of(candidate);
  const auto ref = tokens_of(reference);
  if (cand.empty() || ref.empty()) return cand.empty() && ref.empty() ? 1.0 : 0.0;

  double log_precision = 0.0;
  for (std::size_t n = 1; n <= kMaxOrder; ++n) {
    const NgramCounts c = ngrams(cand, n);
    const NgramCounts r = ngrams(ref, n);
    std::size_t matches = 0;
    std::size_t total = 0;
    for (const auto& [gram, count] : c) {
      total += count;
      auto it = r.find(gram);
      if (it != r.end()) matches += std::min(count, it->second);
    }
    log_precision += std::log((static_cast<double>(matches) + 1.0) /
                              (static_cast<double>(total) + 1.0));
  }
  const double c_len = static_cast<double>(cand.size());
  const double r_len = static_cast<double>(ref.size());
  const double brevity = c_len >= r_len ? 1.0 : std::exp(1.0 - r_len / c_len);
  return brevity * std::exp(log_precision / static_cast<double>(kMaxOrder));
}

double mean_pairwise_rouge_l(const std::vector<std::string>& answers) {
  if (answers.empty()) throw Error(ErrorCode::kMissingInput, "rouge_l needs answers");
  if (answers.size() == 1) return 1.0;
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    for (std::size_t j = i + 1; j < answers.size(); ++j) {
      sum += rouge_l_f1(answers[i], answers[j]);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

double mean_pairwise_bleu(const std::vector<std::string>& answers) {
  if (answers.empty()) throw Error(ErrorCode::kMissingInput, "bleu needs answers");
  if (answers.size() == 1) return 1.0;
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    for (std::size_t j = i + 1; j < answers.size(); ++j) {
      sum += 0.5 * (sentence_bleu(answers[i], answers[j]) + sentence_bleu(answers[j], answers[i]));
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

}  // namespace crux
