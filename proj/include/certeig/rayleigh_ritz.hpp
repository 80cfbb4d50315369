#pragma once

#include <optional>

#include <Eigen/Core>

#include "certeig/sparse_core.hpp"

namespace certeig {

struct RayleighRitzResult {
  Eigen::VectorXd theta;  // ascending Ritz values, length k
  Eigen::MatrixXd C;      // k x k, C^T (S^T B S) C = I, C^T (S^T A S) C = Diag(theta)
};

/// Outcome of a Rayleigh-Ritz call. A degenerate basis (rank-deficient, or a
/// nonpositive diagonal of S^T B S) is reported with the failing pivot index
/// so the caller can prune columns; this module does not prune.
struct RayleighRitzOutcome {
  std::optional<RayleighRitzResult> result;
  int degenerate_pivot = -1;
  bool ok() const { return result.has_value(); }
};

/// Projects the pencil (A, B) onto span(S):
///   D = Diag(S^T B S)^{-1/2}, Cholesky R^T R = D S^T B S D,
///   eigendecomposition of R^{-T} D S^T A S D R^{-1}, C = D R^{-1} Q.
RayleighRitzOutcome rayleighRitz(const LinearOperator& A, const LinearOperator& B,
                                 const Eigen::Ref<const Eigen::MatrixXd>& S);

/// Variant taking precomputed A*S and B*S, so iterative callers can reuse
/// operator applications.
RayleighRitzOutcome rayleighRitzProjected(const Eigen::Ref<const Eigen::MatrixXd>& S,
                                          const Eigen::Ref<const Eigen::MatrixXd>& AS,
                                          const Eigen::Ref<const Eigen::MatrixXd>& BS);

}  // namespace certeig
