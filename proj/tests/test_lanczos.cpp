#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "certeig/lanczos.hpp"
#include "certeig/testgen.hpp"

using namespace certeig;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Triplet = Eigen::Triplet<double>;

namespace {

SparseSymMatrix randomSparseSym(Index n, double density, std::mt19937& gen) {
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::bernoulli_distribution keep(density);
  std::vector<Triplet> trip;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j <= i; ++j)
      if (i == j || keep(gen)) trip.emplace_back(i, j, val(gen));
  return SparseSymMatrix::fromTriplets(n, trip);
}

}  // namespace

TEST_CASE("lanczosExtremal: diagonal matrix smallest") {
  std::vector<Triplet> trip;
  for (int i = 0; i < 10; ++i) trip.emplace_back(i, i, double(i + 1));
  auto A = SparseSymMatrix::fromTriplets(10, trip);
  LanczosConfig cfg;
  cfg.tol = 1e-8;
  auto res = lanczosExtremal(LinearOperator::fromMatrix(A), Extremal::Smallest, cfg);
  CHECK(res.converged);
  CHECK(res.theta == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("lanczosExtremal: matches dense oracle on random sparse n=100") {
  std::mt19937 gen(2);
  for (int rep = 0; rep < 5; ++rep) {
    auto A = randomSparseSym(100, 0.1, gen);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(A.dense());
    LanczosConfig cfg;
    cfg.tol = 1e-8;
    cfg.seed = rep;
    auto lo = lanczosExtremal(LinearOperator::fromMatrix(A), Extremal::Smallest, cfg);
    auto hi = lanczosExtremal(LinearOperator::fromMatrix(A), Extremal::Largest, cfg);
    CHECK(lo.converged);
    CHECK(hi.converged);
    CHECK(std::abs(lo.theta - es.eigenvalues()(0)) <=
          1e-6 * std::max(1.0, std::abs(es.eigenvalues()(0))));
    CHECK(std::abs(hi.theta - es.eigenvalues()(99)) <=
          1e-6 * std::max(1.0, std::abs(es.eigenvalues()(99))));
  }
}

TEST_CASE("lanczosExtremal: Ritz value stays inside the spectrum (interlacing)") {
  std::mt19937 gen(6);
  for (int rep = 0; rep < 10; ++rep) {
    auto A = randomSparseSym(60, 0.15, gen);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(A.dense());
    LanczosConfig cfg;
    cfg.tol = 1e-4;
    cfg.seed = 100 + rep;
    auto res = lanczosExtremal(LinearOperator::fromMatrix(A), Extremal::Smallest, cfg);
    double slack = 1e-10 * A.frobeniusNorm();
    CHECK(res.theta >= es.eigenvalues()(0) - slack);
    CHECK(res.theta <= es.eigenvalues()(59) + slack);
  }
}

TEST_CASE("lanczosExtremal: matvec accounting is exact") {
  std::mt19937 gen(9);
  auto A = randomSparseSym(80, 0.1, gen);
  LinearOperator op = LinearOperator::fromMatrix(A);
  LanczosConfig cfg;
  cfg.tol = 1e-8;
  auto res = lanczosExtremal(op, Extremal::Smallest, cfg);
  CHECK(res.iterations == op.applications());
}

TEST_CASE("lanczosExtremal: restart path converges past the basis cap") {
  // Path Laplacian: slow spectral decay forces many iterations.
  std::vector<std::tuple<Index, Index, double>> edges;
  const Index n = 600;
  for (Index i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1, 1.0);
  auto L = graphLaplacian(n, edges);
  LanczosConfig cfg;
  cfg.tol = 1e-8;
  cfg.restart_dim = 40;  // force restarts
  auto res = lanczosExtremal(LinearOperator::fromMatrix(L), Extremal::Largest, cfg);
  CHECK(res.converged);
  CHECK(res.restarts > 0);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(L.dense());
  CHECK(std::abs(res.theta - es.eigenvalues()(n - 1)) <= 1e-6 * es.eigenvalues()(n - 1));
}

TEST_CASE("lanczosExtremal: iteration counts grow as the gap shrinks") {
  // Monotone-trend check over seeds: mean iterations at gamma = 1e-4 must
  // exceed the mean at gamma = 1e-1.
  double mean_wide = 0.0, mean_narrow = 0.0;
  const int seeds = 10;
  for (int s = 0; s < seeds; ++s) {
    for (double gamma : {1e-1, 1e-4}) {
      TestMatrixSpec spec;
      spec.N = 400;
      spec.gamma = gamma;
      spec.seed = 1000 + s;
      auto sample = sampleTestMatrix(spec);
      LanczosConfig cfg;
      cfg.tol = 1e-2;
      cfg.seed = s;
      auto res = shiftedLanczosMinEig(sample.S, cfg);
      (gamma == 1e-1 ? mean_wide : mean_narrow) += double(res.total_matvecs) / seeds;
    }
  }
  CHECK(mean_narrow > mean_wide);
}

TEST_CASE("shiftedLanczosMinEig: diag(5,-2)") {
  auto S = SparseSymMatrix::fromTriplets(2, {{0, 0, 5.0}, {1, 1, -2.0}});
  LanczosConfig cfg;
  cfg.tol = 1e-8;
  auto res = shiftedLanczosMinEig(S, cfg);
  CHECK(res.converged);
  CHECK(res.lambda_min == doctest::Approx(-2.0).epsilon(1e-6));
  CHECK(std::abs(std::abs(res.x(1)) - 1.0) < 1e-4);
  CHECK(res.sigma >= 5.0);
}

TEST_CASE("shiftedLanczosMinEig: gap matrix recovers -gamma") {
  TestMatrixSpec spec;
  spec.N = 200;
  spec.gamma = 1e-2;
  spec.seed = 17;
  auto sample = sampleTestMatrix(spec);
  LanczosConfig cfg;
  cfg.tol = 1e-2;
  auto res = shiftedLanczosMinEig(sample.S, cfg);
  CHECK(res.converged);
  CHECK(std::abs(res.lambda_min - (-spec.gamma)) <= cfg.tol * spec.gamma);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sample.S.dense());
  CHECK(std::abs(es.eigenvalues().minCoeff() - (-spec.gamma)) <= 1e-10);
}

TEST_CASE("shiftedLanczosMinEig: PSD Laplacian reports lambda_min at zero") {
  std::mt19937 gen(21);
  std::vector<std::tuple<Index, Index, double>> edges;
  const Index n = 50;
  std::uniform_real_distribution<double> w(0.5, 2.0);
  for (Index i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1, w(gen));
  for (int e = 0; e < 60; ++e) {
    Index i = gen() % n, j = gen() % n;
    if (i != j) edges.emplace_back(std::min(i, j), std::max(i, j), w(gen));
  }
  auto L = graphLaplacian(n, edges);
  LanczosConfig cfg;
  cfg.tol = 1e-4;
  auto res = shiftedLanczosMinEig(L, cfg);
  // lambda_min is 0; agreement is judged against the absolute floor.
  double floor = 1e-8 * L.oneNorm();
  CHECK(std::abs(res.lambda_min) <= floor);
}

TEST_CASE("shiftedLanczosMinEig: total matvecs cover both phases exactly") {
  std::mt19937 gen(31);
  auto A = randomSparseSym(70, 0.1, gen);
  LanczosConfig cfg;
  cfg.tol = 1e-6;
  auto res = shiftedLanczosMinEig(A, cfg);
  CHECK(res.total_matvecs > 0);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(A.dense());
  CHECK(std::abs(res.lambda_min - es.eigenvalues()(0)) <=
        1e-4 * std::max(1.0, std::abs(es.eigenvalues()(0))));
}
