#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "crux/clustering.hpp"
#include "crux/consistency.hpp"

namespace crux {

// Baseline confidence scores, all oriented so that higher means more
// confident.
enum class BaselineKind {
  kDegreeMatrix,
  kEccentricity,
  kEigValLaplacian,
  kNumSemSets,
  kRougeL,
  kBleu,
};

inline constexpr std::array<BaselineKind, 6> kAllBaselines = {
    BaselineKind::kDegreeMatrix, BaselineKind::kEccentricity, BaselineKind::kEigValLaplacian,
    BaselineKind::kNumSemSets,   BaselineKind::kRougeL,       BaselineKind::kBleu,
};

// Column / method name, e.g. "degree_matrix".
std::string_view to_string(BaselineKind k);
BaselineKind baseline_from_string(std::string_view s);

struct BaselineInputs {
  const SimilarityMatrix* similarity = nullptr;
  const Partition* partition = nullptr;
  const std::vector<std::string>* answers = nullptr;
};

double baseline_score(BaselineKind kind, const BaselineInputs& inputs);

// trace(D) / m^2.
double degree_matrix_score(const SimilarityMatrix& w);
// -sum_k max(0, 1 - lambda_k) over the normalized Laplacian spectrum.
double eigval_laplacian_score(const SimilarityMatrix& w);
// Negated Frobenius norm of the centered embedding built from the
// min(m, 5) eigenvectors with the smallest eigenvalues.
double eccentricity_score(const SimilarityMatrix& w);
double num_sem_sets_score(const Partition& p);

// Lexical similarities over whitespace tokens of the normalized answers.
double rouge_l_f1(std::string_view a, std::string_view b);
// Sentence BLEU (up to 4-grams, add-one smoothing on every order, brevity
// penalty) of candidate against reference.
double sentence_bleu(std::string_view candidate, std::string_view reference);

// Mean over unordered pairs; BLEU is averaged over both directions per pair
// so the score does not depend on argument order. A single answer scores 1.
double mean_pairwise_rouge_l(const std::vector<std::string>& answers);
double mean_pairwise_bleu(const std::vector<std::string>& answers);

}  // namespace crux
