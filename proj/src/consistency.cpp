#include "crux/consistency.hpp"

#include <cmath>

#include "crux/error.hpp"

namespace crux {

SimilarityMatrix::SimilarityMatrix(std::size_t m) : m_(m), w_(m * m, 0.0) {
  for (std::size_t i = 0; i < m; ++i) w_[i * m + i] = 1.0;
}

SimilarityMatrix::SimilarityMatrix(std::size_t m, std::vector<double> row_major)
    : m_(m), w_(std::move(row_major)) {
  if (w_.size() != m * m) throw Error(ErrorCode::kMatrixInvalid, "matrix data is not m*m");
}

SimilarityMatrix SimilarityMatrix::all_ones(std::size_t m) {
  return SimilarityMatrix(m, std::vector<double>(m * m, 1.0));
}

void SimilarityMatrix::set_symmetric(std::size_t i, std::size_t j, double v) {
  (*this)(i, j) = v;
  (*this)(j, i) = v;
}

SimilarityMatrix SimilarityMatrix::submatrix(const std::vector<std::size_t>& indices) const {
  SimilarityMatrix out(indices.size());
  for (std::size_t a = 0; a < indices.size(); ++a) {
    for (std::size_t b = 0; b < indices.size(); ++b) out(a, b) = (*this)(indices[a], indices[b]);
  }
  return out;
}

void SimilarityMatrix::validate() const {
  if (m_ == 0) throw Error(ErrorCode::kMatrixInvalid, "empty similarity matrix");
  for (std::size_t i = 0; i < m_; ++i) {
    if ((*this)(i, i) != 1.0) throw Error(ErrorCode::kMatrixInvalid, "diagonal must be 1");
    for (std::size_t j = 0; j < m_; ++j) {
      const double v = (*this)(i, j);
      if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::kMatrixInvalid, "entry outside [0,1]");
      if (std::abs(v - (*this)(j, i)) > 1e-9) {
        throw Error(ErrorCode::kMatrixInvalid, "matrix is not symmetric");
      }
    }
  }
}

std::string_view to_string(GcVariant v) { return v == GcVariant::kPairwise ? "pairwise" : "center"; }

GcVariant gc_variant_from_string(std::string_view s) {
  if (s == "pairwise") return GcVariant::kPairwise;
  if (s == "center") return GcVariant::kCenter;
  throw Error(ErrorCode::kConfigInvalid, "gc variant must be pairwise or center");
}

double similarity(const std::string& a, const std::string& b, EntailmentBackend& nli) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::kConfigInvalid, "similarity of empty text");
  if (a == b) return 1.0;
  const double ab = nli.entailment_probs(a, b).p_entail;
  const double ba = nli.entailment_probs(b, a).p_entail;
  return (ab + ba) / 2.0;
}

double distance(double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorCode::kOutOfRange, "similarity outside [0,1]");
  return 1.0 - s;
}

SimilarityMatrix build_similarity_matrix(const std::vector<std::string>& texts,
                                         EntailmentBackend& nli) {
  SimilarityMatrix w(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    for (std::size_t j = i + 1; j < texts.size(); ++j) {
      w.set_symmetric(i, j, similarity(texts[i], texts[j], nli));
    }
  }
  return w;
}

double gc_pairwise(const SimilarityMatrix& w) {
  w.validate();
  const std::size_t m = w.size();
  if (m < 2 || m % 2 != 0) {
    throw Error(ErrorCode::kMatrixInvalid, "pairwise consistency needs an even pooled size >= 2");
  }
  const double n = static_cast<double>(m / 2);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) sum += distance(w(i, j));
  }
  return sum / (n * (1.0 - 2.0 * n)) + 0.0;
}

std::size_t medoid(const SimilarityMatrix& w) {
  std::size_t best = 0;
  double best_total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) total += distance(w(i, j));
    if (i == 0 || total < best_total) {
      best = i;
      best_total = total;
    }
  }
  return best;
}

double gc_center(const SimilarityMatrix& w) {
  w.validate();
  const std::size_t m = w.size();
  if (m < 2) throw Error(ErrorCode::kMatrixInvalid, "center consistency needs at least 2 answers");
  const std::size_t c = medoid(w);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) sum += distance(w(c, i));
  return -sum / static_cast<double>(m) + 0.0;
}

double global_consistency(const SimilarityMatrix& w, GcVariant variant) {
  return variant == GcVariant::kPairwise ? gc_pairwise(w) : gc_center(w);
}

}  // namespace crux
