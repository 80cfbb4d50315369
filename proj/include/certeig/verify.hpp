#pragma once

#include <optional>
#include <variant>

#include "certeig/factor.hpp"
#include "certeig/lobpcg.hpp"
#include "certeig/sparse_core.hpp"

namespace certeig {

struct NonConvergedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Proof that S + eta*I admits a Cholesky factorization, i.e. S >= -eta*I.
/// The factor is absent when the certificate came from an eigenvalue bound
/// (the Lanczos verifier) rather than a factorization.
struct Certificate {
  std::optional<CholeskyFactor> factor;
  double eta = 0.0;
};

/// Witness of indefiniteness: a unit vector with x^T S x = lambda < 0.
struct NegativeCurvature {
  double lambda = 0.0;
  Eigen::VectorXd x;
  int iterations = 0;
  long matvecs = 0;
};

using VerificationOutcome = std::variant<Certificate, NegativeCurvature>;

struct VerifyConfig {
  double tol = 1e-2;             // tau for the eigensolver convergence test
  int blocksize = 5;             // LOBPCG block size m (k is fixed at 1)
  int lobpcg_max_iterations = 500;
  IldlOptions ildl_opts{};
  std::uint64_t seed = 0;
  long lanczos_max_matvecs = 20000;
};

/// Per-run instrumentation for benchmarking.
struct VerifyStats {
  double cholesky_attempt_seconds = 0.0;
  double precond_build_seconds = 0.0;
  int iterations = 0;
  long matvecs = 0;          // applications of the (regularized) matrix
  long precond_applies = 0;  // applications of T
  bool fast_path = false;    // Cholesky succeeded, no eigensolve needed
  double eta_used = 0.0;
  bool converged = true;
};

/// eta scaled to the matrix: 1e-6 * (max |diagonal| + 1).
double defaultEta(const SparseSymMatrix& S);

/// Decides S >= -eta*I (Certificate) or produces a negative-curvature Ritz
/// pair. Sequence: M = S + eta*I; attempt Cholesky; on the indefinite signal,
/// incomplete-factorize M, inertia-correct the blocks into a preconditioner T,
/// and run LOBPCG(M, I, T, X, 1). An ildl pivot breakdown is retried once with
/// eta doubled. Pass precondition = false for the unpreconditioned variant
/// (T = I, no factorization).
VerificationOutcome fastVerification(const SparseSymMatrix& S, double eta,
                                     const VerifyConfig& cfg = {}, VerifyStats* stats = nullptr,
                                     bool precondition = true);

/// Baseline with the same outcome type: spectrally-shifted Lanczos minimum
/// eigenpair, Certificate when lambda_min >= -eta.
VerificationOutcome lanczosVerification(const SparseSymMatrix& S, double eta,
                                        const VerifyConfig& cfg = {}, VerifyStats* stats = nullptr);

}  // namespace certeig
