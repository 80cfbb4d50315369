#pragma once

#include <optional>

#include <Eigen/Core>

#include "certeig/sparse_core.hpp"

namespace certeig {

struct DenseSymEig {
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd eigenvectors; // orthonormal columns
};

/// Symmetric eigendecomposition of a small dense matrix. The input is
/// symmetrized as (A + A^T)/2. Eigenvector signs are normalized so the
/// largest-magnitude component of each column is positive.
DenseSymEig denseSymEig(const Eigen::Ref<const Eigen::MatrixXd>& A);

struct DenseCholeskyResult {
  std::optional<Eigen::MatrixXd> L;  // lower triangular, L * L^T = A
  int failed_pivot = -1;             // first nonpositive pivot column on failure
  bool ok() const { return L.has_value(); }
};

/// Dense lower Cholesky with a semidefiniteness-aware pivot threshold
/// (pivot <= p * eps * max initial diagonal signals failure).
DenseCholeskyResult denseCholesky(const Eigen::Ref<const Eigen::MatrixXd>& A);

}  // namespace certeig
