#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "certeig/verify.hpp"
#include "certeig/testgen.hpp"

using namespace certeig;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Triplet = Eigen::Triplet<double>;

TEST_CASE("fastVerification: identity is certified on the fast path") {
  std::vector<Triplet> trip;
  for (int i = 0; i < 10; ++i) trip.emplace_back(i, i, 1.0);
  auto S = SparseSymMatrix::fromTriplets(10, trip);
  VerifyStats stats;
  auto out = fastVerification(S, 1e-6, {}, &stats);
  REQUIRE(std::holds_alternative<Certificate>(out));
  CHECK(stats.fast_path);
  CHECK(stats.iterations == 0);
  CHECK(std::get<Certificate>(out).factor.has_value());
}

TEST_CASE("fastVerification: gamma > eta produces negative curvature near -gamma") {
  TestMatrixSpec spec;
  spec.N = 200;
  spec.gamma = 1e-3;
  spec.seed = 3;
  auto sample = sampleTestMatrix(spec);
  VerifyConfig cfg;
  auto out = fastVerification(sample.S, 1e-6, cfg);
  REQUIRE(std::holds_alternative<NegativeCurvature>(out));
  const auto& nc = std::get<NegativeCurvature>(out);
  CHECK(nc.lambda >= -1e-3 * (1 + cfg.tol));
  CHECK(nc.lambda <= -1e-3 * (1 - cfg.tol));
  CHECK(std::abs(nc.x.norm() - 1.0) <= 1e-12);
  // The eigenvector of blkdiag(L, -gamma) at -gamma concentrates on the
  // appended coordinate.
  CHECK(std::abs(nc.x(spec.N)) > 0.9);
  // Dense oracle cross-check of the planted minimum eigenvalue.
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sample.S.dense());
  CHECK(std::abs(es.eigenvalues().minCoeff() + spec.gamma) <= 1e-10);
}

TEST_CASE("fastVerification: gamma <= eta takes the Cholesky fast path") {
  TestMatrixSpec spec;
  spec.N = 200;
  spec.gamma = 1e-9;
  spec.seed = 4;
  auto sample = sampleTestMatrix(spec);
  VerifyStats stats;
  auto out = fastVerification(sample.S, 1e-6, {}, &stats);
  REQUIRE(std::holds_alternative<Certificate>(out));
  CHECK(stats.fast_path);
}

TEST_CASE("fastVerification: rejects nonpositive eta") {
  auto S = SparseSymMatrix::fromTriplets(2, {{0, 0, 1.0}, {1, 1, 1.0}});
  CHECK_THROWS_AS(fastVerification(S, 0.0), ConstructionError);
  CHECK_THROWS_AS(fastVerification(S, -1.0), ConstructionError);
}

TEST_CASE("fastVerification: certificate soundness over random probes") {
  TestMatrixSpec spec;
  spec.N = 100;
  spec.gamma = 1e-8;
  spec.seed = 6;
  auto sample = sampleTestMatrix(spec);
  const double eta = 1e-6;
  auto out = fastVerification(sample.S, eta);
  REQUIRE(std::holds_alternative<Certificate>(out));
  std::mt19937 gen(1);
  std::normal_distribution<double> nd;
  for (int probe = 0; probe < 1000; ++probe) {
    VectorXd z(sample.S.rows());
    for (int i = 0; i < z.size(); ++i) z(i) = nd(gen);
    double q = z.dot((sample.S * z).col(0));
    CHECK(q >= -eta * z.squaredNorm() * (1 + 1e-8));
  }
}

TEST_CASE("fastVerification: negative-curvature soundness, lambda recomputed from x") {
  for (std::uint64_t seed : {11u, 12u, 13u, 14u, 15u}) {
    TestMatrixSpec spec;
    spec.N = 150;
    spec.gamma = 5e-3;
    spec.seed = seed;
    auto sample = sampleTestMatrix(spec);
    auto out = fastVerification(sample.S, 1e-6);
    REQUIRE(std::holds_alternative<NegativeCurvature>(out));
    const auto& nc = std::get<NegativeCurvature>(out);
    double recomputed = nc.x.dot((sample.S * nc.x).col(0));
    CHECK(recomputed < 0.0);
    CHECK(std::abs(recomputed - nc.lambda) <= 1e-10 * std::abs(nc.lambda));
  }
}

TEST_CASE("fastVerification: eta-monotonicity of the certificate") {
  TestMatrixSpec spec;
  spec.N = 120;
  spec.gamma = 1e-8;
  spec.seed = 21;
  auto sample = sampleTestMatrix(spec);
  auto o1 = fastVerification(sample.S, 1e-6);
  REQUIRE(std::holds_alternative<Certificate>(o1));
  for (double eta : {1e-5, 1e-4, 1e-3}) {
    auto o2 = fastVerification(sample.S, eta);
    CHECK(std::holds_alternative<Certificate>(o2));
  }
}

TEST_CASE("fastVerification: unpreconditioned variant agrees on the outcome") {
  TestMatrixSpec spec;
  spec.N = 150;
  spec.gamma = 1e-2;
  spec.seed = 31;
  auto sample = sampleTestMatrix(spec);
  VerifyStats pre_stats, plain_stats;
  auto pre = fastVerification(sample.S, 1e-6, {}, &pre_stats, true);
  auto plain = fastVerification(sample.S, 1e-6, {}, &plain_stats, false);
  REQUIRE(std::holds_alternative<NegativeCurvature>(pre));
  REQUIRE(std::holds_alternative<NegativeCurvature>(plain));
  double l1 = std::get<NegativeCurvature>(pre).lambda;
  double l2 = std::get<NegativeCurvature>(plain).lambda;
  CHECK(std::abs(l1 - l2) <= 2e-2 * std::abs(l1));
  CHECK(plain_stats.precond_applies == 0);
}

TEST_CASE("lanczosVerification: identity certified, diag(1,-1) refuted") {
  std::vector<Triplet> trip;
  for (int i = 0; i < 10; ++i) trip.emplace_back(i, i, 1.0);
  auto I10 = SparseSymMatrix::fromTriplets(10, trip);
  auto o1 = lanczosVerification(I10, 1e-6);
  CHECK(std::holds_alternative<Certificate>(o1));

  auto D = SparseSymMatrix::fromTriplets(2, {{0, 0, 1.0}, {1, 1, -1.0}});
  VerifyConfig cfg;
  cfg.tol = 1e-8;
  auto o2 = lanczosVerification(D, 1e-6, cfg);
  REQUIRE(std::holds_alternative<NegativeCurvature>(o2));
  const auto& nc = std::get<NegativeCurvature>(o2);
  CHECK(nc.lambda == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(std::abs(std::abs(nc.x(1)) - 1.0) < 1e-4);
}

TEST_CASE("verifiers agree across 100 sampled instances") {
  int checked = 0;
  for (int t = 0; t < 100; ++t) {
    TestMatrixSpec spec;
    spec.N = 120;
    double u = double(t) / 99.0;
    spec.gamma = std::pow(10.0, -8.0 + 7.0 * u);  // 1e-8 .. 1e-1
    spec.seed = 5000 + t;
    auto sample = sampleTestMatrix(spec);
    const double eta = 1e-6;
    if (spec.gamma > 0.5 * eta && spec.gamma < 20 * eta) continue;  // boundary excluded
    VerifyConfig cfg;
    auto a = fastVerification(sample.S, eta, cfg);
    auto b = lanczosVerification(sample.S, eta, cfg);
    CHECK(a.index() == b.index());
    if (std::holds_alternative<NegativeCurvature>(a)) {
      double la = std::get<NegativeCurvature>(a).lambda;
      double lb = std::get<NegativeCurvature>(b).lambda;
      CHECK(std::abs(la - lb) <= 2 * cfg.tol * std::abs(la));
    }
    ++checked;
  }
  CHECK(checked >= 70);
}

TEST_CASE("defaultEta scales with the diagonal") {
  auto S = SparseSymMatrix::fromTriplets(2, {{0, 0, 1000.0}, {1, 1, -3.0}});
  CHECK(defaultEta(S) == doctest::Approx(1e-6 * 1001.0));
}
