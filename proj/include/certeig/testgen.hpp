#pragma once

#include <cstdint>

#include "certeig/sparse_core.hpp"

namespace certeig {

/// Radius keeping geometric random graphs asymptotically almost surely
/// connected: 1.25 * sqrt(log(N) / (pi N)).
double defaultRadius(Index N);

struct TestMatrixSpec {
  Index N = 2000;          // vertex count; output dimension is N + 1
  double radius = -1.0;    // < 0 -> defaultRadius(N)
  double w_max = 1e3;      // max edge weight
  double gamma = 1e-2;     // gap parameter, >= 0; lambda_min(S) = -gamma
  std::uint64_t seed = 0;
};

struct TestMatrixSample {
  SparseSymMatrix S;  // blkdiag(L(G), -gamma), dimension N + 1
  bool connected = false;
  long num_edges = 0;
};

/// Seeded sampler of certificate-like matrices: vertices uniform on [0,1]^2,
/// edges between pairs strictly closer than the radius, weights uniform on
/// [0, w_max], extended by one diagonal entry -gamma. The minimum eigenvalue
/// is exactly -gamma and the gap to the Laplacian kernel eigenvalue is gamma.
///
/// All randomness comes from the spec's seed through a counter-based
/// generator: stream 0 holds vertex coordinates (counters 2i, 2i+1), stream 1
/// edge weights (counter i*N + j for edge i < j), so identical specs produce
/// bit-identical matrices on every platform.
TestMatrixSample sampleTestMatrix(const TestMatrixSpec& spec);

}  // namespace certeig
