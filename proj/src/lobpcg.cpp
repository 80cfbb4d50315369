#include "certeig/lobpcg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/QR>

#include "certeig/rayleigh_ritz.hpp"
#include "certeig/rng.hpp"

namespace certeig {

namespace {

// One-step Hager estimate of |A|_1 (= |A|_inf for symmetric A).
double oneNormEstimate(const LinearOperator& A) {
  const Index n = A.rows();
  Eigen::MatrixXd x = Eigen::MatrixXd::Constant(n, 1, 1.0 / static_cast<double>(n));
  Eigen::MatrixXd y = A.apply(x);
  Eigen::MatrixXd s(n, 1);
  for (Index i = 0; i < n; ++i) s(i, 0) = y(i, 0) >= 0.0 ? 1.0 : -1.0;
  Eigen::MatrixXd z = A.apply(s);
  return z.cwiseAbs().maxCoeff();
}

Eigen::MatrixXd randomColumns(Index n, int cols, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed);
  Eigen::MatrixXd X(n, cols);
  for (int c = 0; c < cols; ++c)
    for (Index i = 0; i < n; ++i)
      X(i, c) = rng.normal(stream, static_cast<std::uint64_t>(c) * n + i);
  return X;
}

}  // namespace

Eigen::MatrixXd lobpcgRandomStart(Index n, int m, std::uint64_t seed) {
  Eigen::MatrixXd X = randomColumns(n, m, seed, 0);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, m);
}

EigResult lobpcg(const LinearOperator& A, const LinearOperator& B, const LinearOperator& T,
                 const Eigen::Ref<const Eigen::MatrixXd>& X0, const LobpcgConfig& cfg) {
  const Index n = A.rows();
  const int m = static_cast<int>(X0.cols());
  const int k = cfg.k;
  if (k < 1 || k > m) throw ConstructionError("lobpcg: need 1 <= k <= block size");
  if (cfg.tol <= 0.0 || cfg.max_iterations < 1)
    throw ConstructionError("lobpcg: invalid tolerance or iteration cap");
  if (X0.rows() != n) throw DimensionError("lobpcg: X0 row count does not match operator");
  if (m > n) throw ConstructionError("lobpcg: block size exceeds problem dimension");

  const double floor =
      cfg.residual_floor > 0.0
          ? cfg.residual_floor
          : static_cast<double>(n) * std::numeric_limits<double>::epsilon() * oneNormEstimate(A);

  Eigen::MatrixXd X = X0;
  Eigen::MatrixXd AX = A.apply(X), BX = B.apply(X);

  // Initial B-orthonormalization; degenerate start columns are replaced with
  // fresh random ones.
  Eigen::VectorXd theta;
  {
    int attempts = 0;
    for (;;) {
      RayleighRitzOutcome rr = rayleighRitzProjected(X, AX, BX);
      if (rr.ok()) {
        theta = rr.result->theta;
        X = (X * rr.result->C).eval();
        AX = (AX * rr.result->C).eval();
        BX = (BX * rr.result->C).eval();
        break;
      }
      if (++attempts > m + 2) throw NumericalBreakdown("lobpcg: degenerate initial block");
      int p = std::clamp(rr.degenerate_pivot, 0, m - 1);
      X.col(p) = randomColumns(n, 1, 0x5eedULL + attempts, 1);
      AX.col(p) = A.apply(X.col(p));
      BX.col(p) = B.apply(X.col(p));
    }
  }

  Eigen::MatrixXd R = AX - BX * theta.asDiagonal();
  Eigen::MatrixXd P(n, 0), AP(n, 0), BP(n, 0);

  EigResult out;
  out.iterations = 0;
  std::vector<bool> conv(m, false);

  auto countConverged = [&]() {
    Eigen::VectorXd resn = R.colwise().norm();
    int nc = 0;
    for (int i = 0; i < m; ++i) {
      conv[i] = resn[i] <= std::max(cfg.tol * std::abs(theta[i]), floor);
      if (i < k && conv[i]) ++nc;
    }
    return nc;
  };

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    if (countConverged() == k) {
      out.converged = true;
      break;
    }
    out.iterations = iter + 1;

    // Soft locking: residuals of converged leading pairs stay out of W.
    std::vector<int> active;
    for (int i = 0; i < m; ++i)
      if (!conv[i]) active.push_back(i);
    Eigen::MatrixXd Ra(n, static_cast<Index>(active.size()));
    for (size_t c = 0; c < active.size(); ++c) Ra.col(static_cast<Index>(c)) = R.col(active[c]);
    Eigen::MatrixXd W = T.apply(Ra);
    Eigen::MatrixXd AW = A.apply(W), BW = B.apply(W);

    bool useP = P.cols() > 0;
    RayleighRitzOutcome rr;
    Eigen::MatrixXd S, AS, BS;
    int attempts = 0;
    for (;;) {
      const Index wc = W.cols(), pc = useP ? P.cols() : 0;
      S.resize(n, m + wc + pc);
      AS.resize(n, m + wc + pc);
      BS.resize(n, m + wc + pc);
      S << X, W, (useP ? P : Eigen::MatrixXd(n, 0));
      AS << AX, AW, (useP ? AP : Eigen::MatrixXd(n, 0));
      BS << BX, BW, (useP ? BP : Eigen::MatrixXd(n, 0));
      rr = rayleighRitzProjected(S, AS, BS);
      if (rr.ok()) break;
      if (++attempts > 2 * m + 6)
        throw NumericalBreakdown("lobpcg: search basis unrecoverably degenerate");
      int p = rr.degenerate_pivot;
      if (useP) {
        useP = false;  // drop the whole P block first
      } else if (p >= m && wc > 0) {
        int drop = std::min<int>(p - m, static_cast<int>(wc) - 1);
        Eigen::MatrixXd W2(n, wc - 1), AW2(n, wc - 1), BW2(n, wc - 1);
        W2 << W.leftCols(drop), W.rightCols(wc - drop - 1);
        AW2 << AW.leftCols(drop), AW.rightCols(wc - drop - 1);
        BW2 << BW.leftCols(drop), BW.rightCols(wc - drop - 1);
        W = W2; AW = AW2; BW = BW2;
      } else {
        // Degeneracy inside X itself: refresh the offending column.
        int c = std::clamp(p, 0, m - 1);
        X.col(c) = randomColumns(n, 1, 0xbadc01ULL + attempts, 2);
        AX.col(c) = A.apply(X.col(c));
        BX.col(c) = B.apply(X.col(c));
      }
    }

    const Eigen::Index sb = S.cols();
    const Eigen::MatrixXd& C = rr.result->C;
    Eigen::MatrixXd Cx = C.leftCols(m);
    theta = rr.result->theta.head(m);

    Eigen::MatrixXd Xn = S * Cx, AXn = AS * Cx, BXn = BS * Cx;
    if (sb > m) {
      Eigen::MatrixXd Cp = C.bottomRows(sb - m).leftCols(m);
      P = S.rightCols(sb - m) * Cp;
      AP = AS.rightCols(sb - m) * Cp;
      BP = BS.rightCols(sb - m) * Cp;
    } else {
      P.resize(n, 0); AP.resize(n, 0); BP.resize(n, 0);
    }
    X = std::move(Xn); AX = std::move(AXn); BX = std::move(BXn);
    // AX/BX/AP/BP are maintained by recurrence; refresh them with fresh
    // operator applications after any pruning and periodically, so round-off
    // drift cannot accumulate into the projected Gram matrices.
    if (attempts > 0 || (iter + 1) % 32 == 0) {
      AX = A.apply(X); BX = B.apply(X);
      if (P.cols() > 0) { AP = A.apply(P); BP = B.apply(P); }
    }
    R = AX - BX * theta.asDiagonal();
  }
  if (!out.converged && countConverged() == k) out.converged = true;

  out.theta = theta.head(k);
  out.X = X.leftCols(k);
  // Residuals are recomputed from fresh operator applications at return.
  Eigen::MatrixXd Rk = A.apply(out.X) - B.apply(out.X) * out.theta.asDiagonal();
  out.residual_norms = Rk.colwise().norm();
  return out;
}

}  // namespace certeig
