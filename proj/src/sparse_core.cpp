#include "certeig/sparse_core.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <tuple>

namespace certeig {

SparseSymMatrix SparseSymMatrix::fromTriplets(Index n,
                                              const std::vector<Eigen::Triplet<double>>& triplets) {
  if (n < 0) throw ConstructionError("fromTriplets: negative dimension");
  // Sum duplicates separately for the lower and (mirrored) upper sides, then
  // require agreement where both sides were given.
  std::map<std::pair<Index, Index>, double> lo, up;
  for (const auto& t : triplets) {
    Index i = t.row(), j = t.col();
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw ConstructionError("fromTriplets: index (" + std::to_string(i) + "," +
                              std::to_string(j) + ") out of range for n=" + std::to_string(n));
    if (!std::isfinite(t.value()))
      throw ConstructionError("fromTriplets: non-finite value");
    if (i >= j)
      lo[{i, j}] += t.value();
    else
      up[{j, i}] += t.value();
  }
  for (const auto& [key, v] : up) {
    auto it = lo.find(key);
    if (it == lo.end()) {
      lo.emplace(key, v);
    } else {
      double scale = std::max(std::abs(it->second), std::abs(v));
      if (std::abs(it->second - v) > 1e-12 * scale)
        throw ConstructionError("fromTriplets: conflicting values for symmetric pair (" +
                                std::to_string(key.first) + "," + std::to_string(key.second) + ")");
    }
  }

  Eigen::SparseMatrix<double> L(n, n);
  std::vector<Eigen::Triplet<double>> kept;
  kept.reserve(lo.size());
  for (const auto& [key, v] : lo) {
    if (v != 0.0) kept.emplace_back(key.first, key.second, v);
  }
  L.setFromTriplets(kept.begin(), kept.end());
  L.makeCompressed();
  return SparseSymMatrix(std::move(L));
}

Eigen::SparseMatrix<double> SparseSymMatrix::full() const {
  Eigen::SparseMatrix<double> F;
  F = lower_.selfadjointView<Eigen::Lower>();
  F.makeCompressed();
  return F;
}

Eigen::MatrixXd SparseSymMatrix::dense() const {
  Eigen::MatrixXd D = Eigen::MatrixXd(lower_);
  Eigen::MatrixXd Dt = D.transpose();
  Dt.diagonal().setZero();
  return D + Dt;
}

Eigen::MatrixXd SparseSymMatrix::operator*(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
  if (X.rows() != lower_.rows())
    throw DimensionError("symMul: matrix is " + std::to_string(lower_.rows()) + "x" +
                         std::to_string(lower_.rows()) + ", block has " +
                         std::to_string(X.rows()) + " rows");
  return lower_.selfadjointView<Eigen::Lower>() * X;
}

double SparseSymMatrix::frobeniusNorm() const {
  double diag2 = 0.0, off2 = 0.0;
  for (int c = 0; c < lower_.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(lower_, c); it; ++it) {
      double v2 = it.value() * it.value();
      if (it.row() == it.col())
        diag2 += v2;
      else
        off2 += v2;
    }
  }
  return std::sqrt(diag2 + 2.0 * off2);
}

double SparseSymMatrix::maxAbsDiag() const {
  double m = 0.0;
  for (int c = 0; c < lower_.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(lower_, c); it; ++it) {
      if (it.row() == it.col()) m = std::max(m, std::abs(it.value()));
    }
  }
  return m;
}

double SparseSymMatrix::oneNorm() const {
  Eigen::VectorXd colsum = Eigen::VectorXd::Zero(lower_.rows());
  for (int c = 0; c < lower_.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(lower_, c); it; ++it) {
      colsum[it.col()] += std::abs(it.value());
      if (it.row() != it.col()) colsum[it.row()] += std::abs(it.value());
    }
  }
  return colsum.size() == 0 ? 0.0 : colsum.maxCoeff();
}

SparseSymMatrix graphLaplacian(Index N,
                               const std::vector<std::tuple<Index, Index, double>>& edges) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(3 * edges.size());
  for (const auto& [i, j, w] : edges) {
    if (i == j)
      throw ConstructionError("graphLaplacian: self-loop at vertex " + std::to_string(i));
    if (w < 0.0)
      throw ConstructionError("graphLaplacian: negative weight on edge (" + std::to_string(i) +
                              "," + std::to_string(j) + ")");
    if (i < 0 || j < 0 || i >= N || j >= N)
      throw ConstructionError("graphLaplacian: vertex index out of range");
    trip.emplace_back(i, i, w);
    trip.emplace_back(j, j, w);
    trip.emplace_back(std::max(i, j), std::min(i, j), -w);
  }
  return SparseSymMatrix::fromTriplets(N, trip);
}

SparseSymMatrix shiftIdentity(const SparseSymMatrix& M, double eta) {
  std::vector<Eigen::Triplet<double>> trip;
  const auto& L = M.lower();
  trip.reserve(L.nonZeros() + M.rows());
  for (int c = 0; c < L.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(L, c); it; ++it) {
      trip.emplace_back(static_cast<Index>(it.row()), static_cast<Index>(it.col()), it.value());
    }
  }
  for (Index i = 0; i < M.rows(); ++i) trip.emplace_back(i, i, eta);
  return SparseSymMatrix::fromTriplets(M.rows(), trip);
}

}  // namespace certeig
