#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "certeig/factor.hpp"
#include "certeig/sparse_core.hpp"

namespace certeig {

/// D+ for a 1x1 or 2x2 symmetric nonsingular block: every eigenvalue is
/// replaced by the reciprocal of its absolute value, keeping the eigenvectors.
/// The result is symmetric positive definite.
Eigen::MatrixXd inertiaCorrect(const Eigen::Ref<const Eigen::MatrixXd>& D);

/// Positive-definite operator T = S P^T L^{-T} blkdiag(D+) L^{-1} P S built
/// from an inertia-corrected factorization (S is the equilibration scaling,
/// folded in symmetrically). T is never materialized; an application costs two
/// permutations, two sparse triangular solves and the tiny block products.
class Preconditioner {
 public:
  explicit Preconditioner(const BlockDiagFactorization& F);

  Eigen::MatrixXd apply(const Eigen::Ref<const Eigen::MatrixXd>& R) const;

  Index rows() const { return static_cast<Index>(perm_.size()); }

  /// Wraps this preconditioner as a counted LinearOperator.
  LinearOperator op() const;

 private:
  Eigen::VectorXi perm_;
  Eigen::SparseMatrix<double> L_;
  std::vector<DiagBlock> corrected_;  // D+ blocks, positions matching L_
  Eigen::VectorXd scaling_;
};

}  // namespace certeig
