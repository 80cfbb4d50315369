#include "certeig/dense_kernels.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace certeig {

DenseSymEig denseSymEig(const Eigen::Ref<const Eigen::MatrixXd>& A) {
  if (!A.allFinite()) throw NumericalError("denseSymEig: non-finite entries");
  Eigen::MatrixXd S = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success) throw NumericalError("denseSymEig: solver failed");
  DenseSymEig out{es.eigenvalues(), es.eigenvectors()};
  // Sign convention: largest-magnitude component positive.
  for (Eigen::Index c = 0; c < out.eigenvectors.cols(); ++c) {
    Eigen::Index imax;
    out.eigenvectors.col(c).cwiseAbs().maxCoeff(&imax);
    if (out.eigenvectors(imax, c) < 0.0) out.eigenvectors.col(c) *= -1.0;
  }
  return out;
}

DenseCholeskyResult denseCholesky(const Eigen::Ref<const Eigen::MatrixXd>& A) {
  const Eigen::Index p = A.rows();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(p, p);
  const double maxdiag = p > 0 ? A.diagonal().cwiseAbs().maxCoeff() : 0.0;
  const double thresh =
      static_cast<double>(p) * std::numeric_limits<double>::epsilon() * maxdiag;
  for (Eigen::Index j = 0; j < p; ++j) {
    double d = A(j, j) - L.row(j).head(j).squaredNorm();
    if (d <= thresh) return DenseCholeskyResult{std::nullopt, static_cast<int>(j)};
    d = std::sqrt(d);
    L(j, j) = d;
    if (j + 1 < p) {
      L.col(j).tail(p - j - 1) =
          (A.col(j).tail(p - j - 1) -
           L.bottomLeftCorner(p - j - 1, j) * L.row(j).head(j).transpose()) /
          d;
    }
  }
  return DenseCholeskyResult{std::move(L), -1};
}

}  // namespace certeig
