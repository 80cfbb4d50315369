#include "certeig/rayleigh_ritz.hpp"

#include <cmath>
#include <limits>

#include "certeig/dense_kernels.hpp"

namespace certeig {

RayleighRitzOutcome rayleighRitzProjected(const Eigen::Ref<const Eigen::MatrixXd>& S,
                                          const Eigen::Ref<const Eigen::MatrixXd>& AS,
                                          const Eigen::Ref<const Eigen::MatrixXd>& BS) {
  const Eigen::Index k = S.cols();
  Eigen::MatrixXd GB = S.transpose() * BS;
  GB = 0.5 * (GB + GB.transpose()).eval();
  Eigen::MatrixXd GA = S.transpose() * AS;
  GA = 0.5 * (GA + GA.transpose()).eval();

  for (Eigen::Index i = 0; i < k; ++i) {
    if (GB(i, i) <= 0.0) return RayleighRitzOutcome{std::nullopt, static_cast<int>(i)};
  }
  // Guard against a near-zero column; true rank deficiency is still caught by
  // the Cholesky below.
  Eigen::VectorXd d = GB.diagonal()
                          .cwiseMax(std::numeric_limits<double>::epsilon())
                          .cwiseSqrt()
                          .cwiseInverse();
  Eigen::MatrixXd Gs = d.asDiagonal() * GB * d.asDiagonal();
  DenseCholeskyResult chol = denseCholesky(Gs);
  if (!chol.ok()) return RayleighRitzOutcome{std::nullopt, chol.failed_pivot};
  const Eigen::MatrixXd& L = *chol.L;  // R = L^T, R^T R = D GB D

  // Gs has a unit diagonal, so a tiny Cholesky pivot means the column is
  // numerically dependent on its predecessors; report it as degenerate before
  // the ill-conditioned solve can poison the Ritz extraction.
  const double pivot_floor =
      std::sqrt(static_cast<double>(k) * std::numeric_limits<double>::epsilon());
  for (Eigen::Index i = 0; i < k; ++i) {
    if (L(i, i) < pivot_floor) return RayleighRitzOutcome{std::nullopt, static_cast<int>(i)};
  }

  Eigen::MatrixXd H = d.asDiagonal() * GA * d.asDiagonal();
  // R^{-T} H R^{-1} = L^{-1} H L^{-T}
  Eigen::MatrixXd W = L.triangularView<Eigen::Lower>().solve(H);
  W = L.triangularView<Eigen::Lower>().solve(W.transpose().eval());
  DenseSymEig eig = denseSymEig(W);

  // C = D R^{-1} Q = D L^{-T} Q
  Eigen::MatrixXd C = L.transpose().triangularView<Eigen::Upper>().solve(eig.eigenvectors);
  C = d.asDiagonal() * C;
  return RayleighRitzOutcome{RayleighRitzResult{std::move(eig.eigenvalues), std::move(C)}, -1};
}

RayleighRitzOutcome rayleighRitz(const LinearOperator& A, const LinearOperator& B,
                                 const Eigen::Ref<const Eigen::MatrixXd>& S) {
  Eigen::MatrixXd AS = A.apply(S);
  Eigen::MatrixXd BS = B.apply(S);
  return rayleighRitzProjected(S, AS, BS);
}

}  // namespace certeig
