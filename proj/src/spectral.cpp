#include "crux/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crux/error.hpp"

namespace crux {

namespace {

constexpr int kMaxSweeps = 100;

double off_diagonal_norm2(const std::vector<double>& a, std::size_t m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j) s += a[i * m + j] * a[i * m + j];
    }
  }
  return s;
}

}  // namespace

SymmetricEigen jacobi_eigen(std::vector<double> a, std::size_t m) {
  if (a.size() != m * m) throw Error(ErrorCode::kMatrixInvalid, "matrix data is not m*m");
  std::vector<double> v(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) v[i * m + i] = 1.0;

  double total = 0.0;
  for (double x : a) total += x * x;
  const double stop = 1e-30 * std::max(total, 1e-300);

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm2(a, m) <= stop) break;
    for (std::size_t p = 0; p + 1 < m; ++p) {
      for (std::size_t q = p + 1; q < m; ++q) {
        const double apq = a[p * m + q];
        if (apq == 0.0) continue;
        const double app = a[p * m + p];
        const double aqq = a[q * m + q];
        // Rotation angle chosen to zero a(p,q); the smaller root of the
        // quadratic in t keeps |theta| <= pi/4.
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < m; ++k) {
          const double akp = a[k * m + p];
          const double akq = a[k * m + q];
          a[k * m + p] = c * akp - s * akq;
          a[k * m + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < m; ++k) {
          const double apk = a[p * m + k];
          const double aqk = a[q * m + k];
          a[p * m + k] = c * apk - s * aqk;
          a[q * m + k] = s * apk + c * aqk;
        }
        a[p * m + q] = 0.0;
        a[q * m + p] = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
          const double vkp = v[k * m + p];
          const double vkq = v[k * m + q];
          v[k * m + p] = c * vkp - s * vkq;
          v[k * m + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x * m + x] < a[y * m + y]; });

  SymmetricEigen out;
  out.m = m;
  out.values.resize(m);
  out.vectors.resize(m * m);
  for (std::size_t k = 0; k < m; ++k) {
    out.values[k] = a[order[k] * m + order[k]];
    for (std::size_t row = 0; row < m; ++row) out.vectors[row * m + k] = v[row * m + order[k]];
  }
  return out;
}

std::vector<double> normalized_laplacian(const SimilarityMatrix& w) {
  const std::size_t m = w.size();
  std::vector<double> inv_sqrt_deg(m);
  for (std::size_t i = 0; i < m; ++i) {
    double deg = 0.0;
    for (std::size_t j = 0; j < m; ++j) deg += w(i, j);
    if (!(deg > 0.0)) throw Error(ErrorCode::kZeroDegreeRow, "row " + std::to_string(i));
    inv_sqrt_deg[i] = 1.0 / std::sqrt(deg);
  }
  w.validate();
  std::vector<double> l(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      l[i * m + j] = (i == j ? 1.0 : 0.0) - inv_sqrt_deg[i] * w(i, j) * inv_sqrt_deg[j];
    }
  }
  // Exact symmetry for the solver.
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) l[j * m + i] = l[i * m + j];
  }
  return l;
}

SymmetricEigen laplacian_eigen(const SimilarityMatrix& w) {
  return jacobi_eigen(normalized_laplacian(w), w.size());
}

std::vector<double> laplacian_eigenvalues(const SimilarityMatrix& w) {
  return laplacian_eigen(w).values;
}

}  // namespace crux
