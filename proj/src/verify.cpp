#include "certeig/verify.hpp"

#include <chrono>
#include <cmath>

#include "certeig/lanczos.hpp"
#include "certeig/precond.hpp"

namespace certeig {

namespace {

double seconds(std::chrono::steady_clock::time_point a, std::chrono::steady_clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

}  // namespace

double defaultEta(const SparseSymMatrix& S) { return 1e-6 * (S.maxAbsDiag() + 1.0); }

VerificationOutcome fastVerification(const SparseSymMatrix& S, double eta, const VerifyConfig& cfg,
                                     VerifyStats* stats, bool precondition) {
  if (!(eta > 0.0)) throw ConstructionError("fastVerification: eta must be positive");
  const Index n = S.rows();
  VerifyStats local;
  VerifyStats& st = stats ? *stats : local;

  for (int attempt = 0;; ++attempt) {
    st.eta_used = eta;
    SparseSymMatrix M = shiftIdentity(S, eta);

    auto t0 = std::chrono::steady_clock::now();
    CholeskyOutcome chol = attemptCholesky(M);
    st.cholesky_attempt_seconds = seconds(t0, std::chrono::steady_clock::now());

    if (std::holds_alternative<CholeskyFactor>(chol)) {
      st.fast_path = true;
      st.iterations = 0;
      return Certificate{std::move(std::get<CholeskyFactor>(chol)), eta};
    }

    LinearOperator T;
    auto t1 = std::chrono::steady_clock::now();
    if (precondition) {
      try {
        BlockDiagFactorization F = ildl(M, cfg.ildl_opts);
        T = Preconditioner(F).op();
      } catch (const PivotBreakdown&) {
        if (attempt == 0) {
          eta *= 2.0;
          continue;
        }
        throw;
      }
    } else {
      T = LinearOperator::identity(n);
    }
    st.precond_build_seconds = seconds(t1, std::chrono::steady_clock::now());

    LinearOperator A = LinearOperator::fromMatrix(M);
    LinearOperator B = LinearOperator::identity(n);
    Eigen::MatrixXd X0 = lobpcgRandomStart(n, cfg.blocksize, cfg.seed);

    LobpcgConfig lc;
    lc.k = 1;
    lc.tol = cfg.tol;
    lc.max_iterations = cfg.lobpcg_max_iterations;
    EigResult res = lobpcg(A, B, T, X0, lc);

    st.iterations = res.iterations;
    st.matvecs = A.applications();
    st.precond_applies = precondition ? T.applications() : 0;
    st.converged = res.converged;

    Eigen::VectorXd x = res.X.col(0);
    x /= x.norm();
    double lambda = x.dot((S * x).col(0));  // recomputed, = theta - eta to round-off

    if (!res.converged && lambda >= 0.0)
      throw NonConvergedError("fastVerification: LOBPCG hit the iteration cap without a "
                              "negative-curvature direction");
    return NegativeCurvature{lambda, std::move(x), res.iterations, st.matvecs};
  }
}

VerificationOutcome lanczosVerification(const SparseSymMatrix& S, double eta,
                                        const VerifyConfig& cfg, VerifyStats* stats) {
  if (!(eta > 0.0)) throw ConstructionError("lanczosVerification: eta must be positive");
  VerifyStats local;
  VerifyStats& st = stats ? *stats : local;
  st.eta_used = eta;

  LanczosConfig lc;
  lc.tol = cfg.tol;
  lc.seed = cfg.seed;
  lc.max_matvecs = cfg.lanczos_max_matvecs;
  ShiftedLanczosResult res = shiftedLanczosMinEig(S, lc);
  st.matvecs = res.total_matvecs;
  st.iterations = static_cast<int>(res.total_matvecs);
  st.converged = res.converged;

  if (res.lambda_min >= -eta) return Certificate{std::nullopt, eta};

  Eigen::VectorXd x = res.x;
  x /= x.norm();
  double lambda = x.dot((S * x).col(0));
  if (!res.converged && lambda >= 0.0)
    throw NonConvergedError("lanczosVerification: no negative-curvature direction at the cap");
  return NegativeCurvature{lambda, std::move(x), static_cast<int>(res.total_matvecs),
                           res.total_matvecs};
}

}  // namespace certeig
