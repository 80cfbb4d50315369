#include "certeig/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "certeig/dense_kernels.hpp"
#include "certeig/rng.hpp"

namespace certeig {

namespace {

Eigen::VectorXd randomUnit(Index n, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed);
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.normal(stream, static_cast<std::uint64_t>(i));
  double nrm = v.norm();
  if (nrm == 0.0) v[0] = 1.0, nrm = 1.0;
  return v / nrm;
}

// Orthogonalize w against the first j columns of V (two passes).
void reorthogonalize(const Eigen::MatrixXd& V, int j, Eigen::VectorXd& w) {
  for (int pass = 0; pass < 2; ++pass) {
    if (j > 0) w.noalias() -= V.leftCols(j) * (V.leftCols(j).transpose() * w);
  }
}

}  // namespace

LanczosResult lanczosExtremal(const LinearOperator& A, Extremal which, const LanczosConfig& cfg) {
  const Index n = A.rows();
  const int cap = std::min<int>(cfg.restart_dim, static_cast<int>(n));
  const int keep = std::min(cfg.thick_keep, std::max(1, cap - 2));
  const double eps = std::numeric_limits<double>::epsilon();

  Eigen::MatrixXd V(n, cap), AV(n, cap);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(cap, cap);

  LanczosResult out;
  long matvecs = 0;
  std::uint64_t rnd_stream = 0;

  int j = 0;  // current basis size
  {
    Eigen::VectorXd v = randomUnit(n, cfg.seed, rnd_stream++);
    V.col(0) = v;
    AV.col(0) = A.apply(v);
    ++matvecs;
    H(0, 0) = v.dot(AV.col(0));
    j = 1;
  }

  double spectral_scale = std::abs(H(0, 0));
  auto floorOf = [&]() {
    return cfg.residual_floor > 0.0
               ? cfg.residual_floor
               : static_cast<double>(n) * eps * std::max(spectral_scale, 1.0);
  };

  auto ritz = [&](double& theta, Eigen::VectorXd& s) {
    DenseSymEig eig = denseSymEig(H.topLeftCorner(j, j));
    spectral_scale = std::max(spectral_scale,
                              std::max(std::abs(eig.eigenvalues[0]), std::abs(eig.eigenvalues[j - 1])));
    int idx = which == Extremal::Smallest ? 0 : j - 1;
    theta = eig.eigenvalues[idx];
    s = eig.eigenvectors.col(idx);
  };

  double theta = H(0, 0);
  Eigen::VectorXd s = Eigen::VectorXd::Ones(1);

  while (matvecs < cfg.max_matvecs) {
    // Extend the basis from the most recent direction's residual.
    Eigen::VectorXd w = AV.col(j - 1);
    reorthogonalize(V, j, w);
    double beta = w.norm();
    if (beta <= 1e3 * eps * std::max(spectral_scale, 1.0)) {
      // Lucky breakdown: continue with a fresh random direction orthogonal to
      // the current (converged) space.
      w = randomUnit(n, cfg.seed, 1000 + rnd_stream++);
      reorthogonalize(V, j, w);
      beta = w.norm();
      if (beta <= 0.0) break;  // basis spans everything reachable
    }
    V.col(j) = w / beta;
    AV.col(j) = A.apply(V.col(j));
    ++matvecs;
    Eigen::VectorXd h = V.leftCols(j + 1).transpose() * AV.col(j);
    H.block(0, j, j + 1, 1) = h;
    H.block(j, 0, 1, j) = h.head(j).transpose();
    ++j;

    const bool full = j == cap;
    const int interval = j <= 60 ? 1 : 10;
    if (full || j % interval == 0 || matvecs >= cfg.max_matvecs) {
      ritz(theta, s);
      Eigen::VectorXd x = V.leftCols(j) * s;
      Eigen::VectorXd r = AV.leftCols(j) * s - theta * x;
      out.residual = r.norm();
      double scale = std::abs(theta - cfg.conv_ref_shift);
      if (out.residual <= std::max(cfg.tol * scale, floorOf())) {
        out.converged = true;
        out.theta = theta;
        out.x = x;
        out.iterations = matvecs;
        return out;
      }
      if (full) {
        // Thick restart: retain the `keep` Ritz vectors nearest the target end.
        Eigen::MatrixXd Skeep(j, keep);
        Eigen::VectorXd tkeep(keep);
        DenseSymEig eig = denseSymEig(H.topLeftCorner(j, j));
        for (int i = 0; i < keep; ++i) {
          int idx = which == Extremal::Smallest ? i : j - 1 - i;
          Skeep.col(i) = eig.eigenvectors.col(idx);
          tkeep[i] = eig.eigenvalues[idx];
        }
        Eigen::MatrixXd Y = V.leftCols(j) * Skeep;
        Eigen::MatrixXd AY = AV.leftCols(j) * Skeep;
        V.leftCols(keep) = Y;
        AV.leftCols(keep) = AY;
        H.setZero();
        H.topLeftCorner(keep, keep) = tkeep.asDiagonal();
        j = keep;
        ++out.restarts;
      }
    }
  }

  // Cap reached: report the best pair found.
  ritz(theta, s);
  Eigen::VectorXd x = V.leftCols(j) * s;
  out.theta = theta;
  out.x = x;
  out.residual = (AV.leftCols(j) * s - theta * x).norm();
  out.iterations = matvecs;
  out.converged =
      out.residual <= std::max(cfg.tol * std::abs(theta - cfg.conv_ref_shift), floorOf());
  return out;
}

ShiftedLanczosResult shiftedLanczosMinEig(const SparseSymMatrix& S, const LanczosConfig& cfg) {
  auto held = std::make_shared<SparseSymMatrix>(S);
  const Index n = S.rows();
  LinearOperator A(n, [held](const Eigen::Ref<const Eigen::MatrixXd>& X) { return (*held) * X; });

  // Phase 1: upper bound on lambda_max with a safety margin covering the
  // residual of the estimate.
  LanczosConfig c1 = cfg;
  c1.conv_ref_shift = 0.0;
  LanczosResult top = lanczosExtremal(A, Extremal::Largest, c1);
  double sigma = top.theta + top.residual + 0.01 * std::abs(top.theta) +
                 static_cast<double>(n) * std::numeric_limits<double>::epsilon() *
                     std::max(1.0, std::abs(top.theta));

  // Phase 2: dominant eigenpair of sigma*I - S.
  LinearOperator Ashift(n, [held, sigma](const Eigen::Ref<const Eigen::MatrixXd>& X) {
    return Eigen::MatrixXd(sigma * X - (*held) * X);
  });
  LanczosConfig c2 = cfg;
  c2.seed = cfg.seed + 1;
  c2.conv_ref_shift = sigma;  // scale test by |lambda_min| = |theta - sigma|
  c2.max_matvecs = std::max<long>(1, cfg.max_matvecs - top.iterations);
  LanczosResult dom = lanczosExtremal(Ashift, Extremal::Largest, c2);

  ShiftedLanczosResult out;
  out.lambda_min = sigma - dom.theta;
  out.x = dom.x;
  out.total_matvecs = top.iterations + dom.iterations;
  out.converged = dom.converged;
  out.sigma = sigma;
  return out;
}

}  // namespace certeig
