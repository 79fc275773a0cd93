#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "crux/backends.hpp"

namespace crux {

// Dense symmetric similarity matrix over m answers, entries in [0,1] with a
// unit diagonal.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  explicit SimilarityMatrix(std::size_t m);  // identity
  SimilarityMatrix(std::size_t m, std::vector<double> row_major);

  static SimilarityMatrix all_ones(std::size_t m);

  std::size_t size() const { return m_; }
  double operator()(std::size_t i, std::size_t j) const { return w_[i * m_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return w_[i * m_ + j]; }
  const std::vector<double>& data() const { return w_; }

  // Sets both (i,j) and (j,i).
  void set_symmetric(std::size_t i, std::size_t j, double v);

  // Principal submatrix on the given indices, in the order given.
  SimilarityMatrix submatrix(const std::vector<std::size_t>& indices) const;

  // Throws MatrixInvalid on asymmetry beyond 1e-9, a non-unit diagonal, or
  // entries outside [0,1].
  void validate() const;

 private:
  std::size_t m_ = 0;
  std::vector<double> w_;
};

enum class GcVariant { kPairwise, kCenter };

std::string_view to_string(GcVariant v);
GcVariant gc_variant_from_string(std::string_view s);

// Mean of the two directional entailment probabilities. Identical strings
// score 1 without consulting the backend.
double similarity(const std::string& a, const std::string& b, EntailmentBackend& nli);

// d = 1 - s; throws OutOfRange for s outside [0,1].
double distance(double s);

SimilarityMatrix build_similarity_matrix(const std::vector<std::string>& texts,
                                         EntailmentBackend& nli);

// Sum of pairwise distances over i<j divided by n(1-2n) for m = 2n answers,
// i.e. the negated mean pairwise distance. Requires even m >= 2.
double gc_pairwise(const SimilarityMatrix& w);

// Medoid (lowest total distance, ties to the lowest index).
std::size_t medoid(const SimilarityMatrix& w);

// -(1/m) * sum_i d(medoid, i).
double gc_center(const SimilarityMatrix& w);

double global_consistency(const SimilarityMatrix& w, GcVariant variant);

}  // namespace crux
