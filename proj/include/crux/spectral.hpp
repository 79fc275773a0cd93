#pragma once

#include <cstddef>
#include <vector>

#include "crux/consistency.hpp"

namespace crux {

// Eigen-decomposition of a real symmetric matrix. values ascending;
// vectors is row-major m*m with eigenvector k stored in column k.
struct SymmetricEigen {
  std::size_t m = 0;
  std::vector<double> values;
  std::vector<double> vectors;

  double vector_entry(std::size_t row, std::size_t k) const { return vectors[row * m + k]; }
};

// Cyclic Jacobi rotations until the off-diagonal mass is negligible. The
// input is row-major m*m and must be symmetric.
SymmetricEigen jacobi_eigen(std::vector<double> a, std::size_t m);

// L = I - D^-1/2 W D^-1/2, row-major. Throws ZeroDegreeRow for a row with
// non-positive sum.
std::vector<double> normalized_laplacian(const SimilarityMatrix& w);

SymmetricEigen laplacian_eigen(const SimilarityMatrix& w);

// Ascending eigenvalues of the normalized Laplacian.
std::vector<double> laplacian_eigenvalues(const SimilarityMatrix& w);

}  // namespace crux
