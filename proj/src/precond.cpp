#include "certeig/precond.hpp"

#include <cmath>

#include "certeig/dense_kernels.hpp"

namespace certeig {

Eigen::MatrixXd inertiaCorrect(const Eigen::Ref<const Eigen::MatrixXd>& D) {
  if (D.rows() == 1) {
    if (D(0, 0) == 0.0) throw PivotBreakdown("inertiaCorrect: singular 1x1 block");
    Eigen::MatrixXd out(1, 1);
    out(0, 0) = 1.0 / std::abs(D(0, 0));
    return out;
  }
  DenseSymEig eig = denseSymEig(D);
  Eigen::VectorXd inv(D.rows());
  for (Eigen::Index i = 0; i < D.rows(); ++i) {
    if (eig.eigenvalues[i] == 0.0) throw PivotBreakdown("inertiaCorrect: singular block");
    inv[i] = 1.0 / std::abs(eig.eigenvalues[i]);
  }
  return eig.eigenvectors * inv.asDiagonal() * eig.eigenvectors.transpose();
}

Preconditioner::Preconditioner(const BlockDiagFactorization& F)
    : perm_(F.perm), L_(F.L), scaling_(F.scaling) {
  corrected_.reserve(F.blocks.size());
  for (const auto& b : F.blocks) {
    Eigen::MatrixXd Dp = inertiaCorrect(b.dense());
    DiagBlock cb;
    cb.start = b.start;
    cb.size = b.size;
    cb.d11 = Dp(0, 0);
    if (b.size == 2) {
      cb.d21 = Dp(1, 0);
      cb.d22 = Dp(1, 1);
    }
    corrected_.push_back(cb);
  }
}

Eigen::MatrixXd Preconditioner::apply(const Eigen::Ref<const Eigen::MatrixXd>& R) const {
  const Index n = rows();
  if (R.rows() != n) throw DimensionError("Preconditioner::apply: dimension mismatch");

  Eigen::MatrixXd Z(n, R.cols());
  for (Index t = 0; t < n; ++t) Z.row(t) = scaling_[perm_[t]] * R.row(perm_[t]);

  L_.triangularView<Eigen::Lower>().solveInPlace(Z);

  for (const auto& b : corrected_) {
    if (b.size == 1) {
      Z.row(b.start) *= b.d11;
    } else {
      Eigen::RowVectorXd y0 = Z.row(b.start), y1 = Z.row(b.start + 1);
      Z.row(b.start) = b.d11 * y0 + b.d21 * y1;
      Z.row(b.start + 1) = b.d21 * y0 + b.d22 * y1;
    }
  }

  L_.transpose().triangularView<Eigen::Upper>().solveInPlace(Z);

  Eigen::MatrixXd out(n, R.cols());
  for (Index t = 0; t < n; ++t) out.row(perm_[t]) = scaling_[perm_[t]] * Z.row(t);

  if (!out.allFinite()) throw NumericalError("Preconditioner::apply: non-finite result");
  return out;
}

LinearOperator Preconditioner::op() const {
  auto held = std::make_shared<Preconditioner>(*this);
  return LinearOperator(rows(), [held](const Eigen::Ref<const Eigen::MatrixXd>& X) {
    return held->apply(X);
  });
}

}  // namespace certeig
