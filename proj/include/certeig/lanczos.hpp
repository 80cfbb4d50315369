#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "certeig/sparse_core.hpp"

namespace certeig {

enum class Extremal { Smallest, Largest };

struct LanczosConfig {
  double tol = 1e-2;        // relative residual tolerance
  long max_matvecs = 20000;
  std::uint64_t seed = 0;
  int restart_dim = 250;    // basis cap
  int thick_keep = 10;      // Ritz vectors retained across a restart
  double residual_floor = 0.0;  // 0 -> n*eps*(spectral estimate)
  // When nonzero, the convergence test uses |theta - conv_ref_shift| as the
  // relative scale (for spectrally-shifted operators whose target eigenvalue
  // sits near the shift).
  double conv_ref_shift = 0.0;
};

struct LanczosResult {
  double theta = 0.0;
  Eigen::VectorXd x;
  long iterations = 0;  // = operator applications
  double residual = 0.0;
  int restarts = 0;
  bool converged = false;
};

/// Extremal Ritz pair by a Lanczos process with full reorthogonalization and
/// thick restarts. Convergence: ||A x - theta x|| <= max(tol * scale, floor)
/// with scale = |theta - conv_ref_shift|.
LanczosResult lanczosExtremal(const LinearOperator& A, Extremal which, const LanczosConfig& cfg);

struct ShiftedLanczosResult {
  double lambda_min = 0.0;
  Eigen::VectorXd x;
  long total_matvecs = 0;
  bool converged = false;
  double sigma = 0.0;  // spectral shift used in phase 2
};

/// Two-phase spectrally-shifted minimum eigenvalue: bound lambda_max(S) from
/// above by sigma, then compute the dominant eigenpair of sigma*I - S.
ShiftedLanczosResult shiftedLanczosMinEig(const SparseSymMatrix& S, const LanczosConfig& cfg);

}  // namespace certeig
