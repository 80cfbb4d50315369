#pragma once

#include <Eigen/Core>

#include "certeig/sparse_core.hpp"

namespace certeig {

struct LobpcgConfig {
  int k = 1;                  // desired eigenpairs, 1 <= k <= block size
  double tol = 1e-2;          // relative residual tolerance tau
  int max_iterations = 500;
  double residual_floor = 0;  // absolute floor; 0 -> n*eps*|A|_1 estimate
};

struct EigResult {
  Eigen::VectorXd theta;       // ascending Ritz values, length k
  Eigen::MatrixXd X;           // n x k Ritz vectors
  int iterations = 0;
  Eigen::VectorXd residual_norms;  // ||A x_i - theta_i B x_i||_2, recomputed at return
  bool converged = false;
};

struct NumericalBreakdown : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Locally optimal block preconditioned conjugate gradient iteration for the
/// k algebraically-smallest eigenpairs of A x = lambda B x. A, B symmetric;
/// B and T positive definite. X0 supplies the block (m = X0.cols() >= k).
///
/// Convergence per pair uses ||A x - theta B x|| <= max(tol * |theta|, floor);
/// the floor keeps the test attainable when the target eigenvalue is 0.
/// Hitting the iteration cap returns converged = false, not an error.
EigResult lobpcg(const LinearOperator& A, const LinearOperator& B, const LinearOperator& T,
                 const Eigen::Ref<const Eigen::MatrixXd>& X0, const LobpcgConfig& cfg);

/// Convenience: random B-orthonormalized start block with m columns.
Eigen::MatrixXd lobpcgRandomStart(Index n, int m, std::uint64_t seed);

}  // namespace certeig
