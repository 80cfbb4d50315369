#pragma once

#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "certeig/sparse_core.hpp"

namespace certeig {

struct PivotBreakdown : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sparse Cholesky factor: perm(t) is the original index at permuted
/// position t, and (P M P^T) = L L^T with diag(L) > 0.
struct CholeskyFactor {
  Eigen::VectorXi perm;
  Eigen::SparseMatrix<double> L;  // lower triangular, permuted coordinates

  /// z^T M z evaluated through the factor, = ||L^T (P z)||^2.
  double quadForm(const Eigen::Ref<const Eigen::VectorXd>& z) const;
};

struct IndefiniteSignal {
  int column;  // first failing pivot position (after permutation)
};

using CholeskyOutcome = std::variant<CholeskyFactor, IndefiniteSignal>;

/// Attempts a sparse LL^T factorization of M under a fill-reducing ordering.
/// Success iff every pivot exceeds n * eps * max initial diagonal; an
/// indefinite matrix is a normal outcome, reported with the failing column.
CholeskyOutcome attemptCholesky(const SparseSymMatrix& M);

/// 1x1 or 2x2 symmetric pivot block.
struct DiagBlock {
  int start = 0;   // column position of the block
  int size = 1;    // 1 or 2
  double d11 = 0, d21 = 0, d22 = 0;

  Eigen::MatrixXd dense() const;
};

struct IldlOptions {
  int fill_limit = -1;     // max off-diagonal nonzeros kept per column; -1 -> 2 * avg column nnz
  double drop_tol = 1e-3;  // relative magnitude threshold within a column
  bool equilibrate = true; // symmetric max-norm scaling before factorization
};

/// Limited-memory incomplete symmetric indefinite LDL^T with Bunch-Kaufman
/// style 1x1/2x2 pivoting: scaling * (P M P^T) * scaling ~= L D L^T.
/// With unlimited fill and zero drop tolerance the factorization is exact.
struct BlockDiagFactorization {
  Eigen::VectorXi perm;           // position -> original index
  Eigen::SparseMatrix<double> L;  // unit lower triangular (unit diagonal stored)
  std::vector<DiagBlock> blocks;
  Eigen::VectorXd scaling;        // s with S M S factored; ones if equilibration off
  long dropped = 0;               // entries discarded by the fill/drop rules

  /// L * blkdiag(D) * L^T, i.e. the (scaled, permuted) matrix this
  /// factorization represents. Test-sized use only.
  Eigen::MatrixXd reconstructPermutedScaled() const;

  /// (#positive, #negative) block eigenvalues.
  std::pair<int, int> inertia() const;
};

BlockDiagFactorization ildl(const SparseSymMatrix& M, const IldlOptions& opts = {});

/// Fill-reducing (AMD) ordering of M's pattern; perm(t) = original index at
/// position t.
Eigen::VectorXi amdOrdering(const SparseSymMatrix& M);

}  // namespace certeig
