#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace certeig {

using Index = int;

struct ConstructionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Symmetric real sparse matrix storing the lower triangle only.
/// Immutable after construction; the logical matrix is the stored triangle
/// mirrored across the diagonal.
class SparseSymMatrix {
 public:
  SparseSymMatrix() = default;

  /// Builds from (row, col, value) triplets. Upper-triangle triplets are
  /// mirrored to the lower triangle; duplicates at the same logical position
  /// on the same side are summed; exact zeros are dropped afterwards.
  /// Throws ConstructionError on out-of-range indices or when (i,j) and (j,i)
  /// are both given with differing values.
  static SparseSymMatrix fromTriplets(Index n,
                                      const std::vector<Eigen::Triplet<double>>& triplets);

  Index rows() const { return static_cast<Index>(lower_.rows()); }
  Index nonZeros() const { return static_cast<Index>(lower_.nonZeros()); }

  /// Stored lower triangle, compressed column-major.
  const Eigen::SparseMatrix<double>& lower() const { return lower_; }

  /// Full symmetric matrix in sparse form (both triangles materialized).
  Eigen::SparseMatrix<double> full() const;

  Eigen::MatrixXd dense() const;

  /// Product of the logical symmetric matrix with a dense block.
  Eigen::MatrixXd operator*(const Eigen::Ref<const Eigen::MatrixXd>& X) const;

  double frobeniusNorm() const;
  double maxAbsDiag() const;
  /// Cheap upper estimate of the 1-norm (max absolute column sum).
  double oneNorm() const;

 private:
  explicit SparseSymMatrix(Eigen::SparseMatrix<double> lower) : lower_(std::move(lower)) {}
  Eigen::SparseMatrix<double> lower_;  // row >= col entries only
};

inline Eigen::MatrixXd symMul(const SparseSymMatrix& M,
                              const Eigen::Ref<const Eigen::MatrixXd>& X) {
  return M * X;
}

/// Weighted graph Laplacian on N vertices. Edges are (i, j, w) with i != j and
/// w >= 0; duplicate edges have their weights summed.
SparseSymMatrix graphLaplacian(Index N, const std::vector<std::tuple<Index, Index, double>>& edges);

/// M + eta * I. All n diagonal entries are present in the sum; exact zeros on
/// the diagonal are dropped per fromTriplets policy.
SparseSymMatrix shiftIdentity(const SparseSymMatrix& M, double eta);

/// Symmetric linear operator on dense blocks. Applications are counted through
/// a shared counter so callers can report exact matvec totals.
class LinearOperator {
 public:
  LinearOperator() = default;
  LinearOperator(Index n, std::function<Eigen::MatrixXd(const Eigen::Ref<const Eigen::MatrixXd>&)> fn)
      : n_(n), fn_(std::move(fn)), count_(std::make_shared<long>(0)) {}

  Index rows() const { return n_; }

  Eigen::MatrixXd apply(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
    if (static_cast<Index>(X.rows()) != n_)
      throw DimensionError("LinearOperator::apply: block has " + std::to_string(X.rows()) +
                           " rows, operator has dimension " + std::to_string(n_));
    *count_ += static_cast<long>(X.cols());
    return fn_(X);
  }

  long applications() const { return *count_; }
  void resetCount() const { *count_ = 0; }

  static LinearOperator identity(Index n) {
    return LinearOperator(n, [](const Eigen::Ref<const Eigen::MatrixXd>& X) {
      return Eigen::MatrixXd(X);
    });
  }

  static LinearOperator fromMatrix(SparseSymMatrix M) {
    Index n = M.rows();
    auto held = std::make_shared<SparseSymMatrix>(std::move(M));
    return LinearOperator(n, [held](const Eigen::Ref<const Eigen::MatrixXd>& X) {
      return (*held) * X;
    });
  }

 private:
  Index n_ = 0;
  std::function<Eigen::MatrixXd(const Eigen::Ref<const Eigen::MatrixXd>&)> fn_;
  std::shared_ptr<long> count_;
};

}  // namespace certeig
