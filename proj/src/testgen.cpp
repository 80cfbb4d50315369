#include "certeig/testgen.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "certeig/rng.hpp"

namespace certeig {

double defaultRadius(Index N) {
  return 1.25 * std::sqrt(std::log(static_cast<double>(N)) /
                          (std::numbers::pi * static_cast<double>(N)));
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

TestMatrixSample sampleTestMatrix(const TestMatrixSpec& spec) {
  const Index N = spec.N;
  if (N < 2) throw ConstructionError("sampleTestMatrix: need N >= 2");
  const double r = spec.radius < 0.0 ? defaultRadius(N) : spec.radius;
  if (!(r > 0.0) || !(spec.w_max > 0.0) || spec.gamma < 0.0)
    throw ConstructionError("sampleTestMatrix: invalid radius, weight bound, or gamma");

  CounterRng rng(spec.seed);
  std::vector<double> xs(N), ys(N);
  for (Index i = 0; i < N; ++i) {
    xs[i] = rng.uniform(0, 2 * static_cast<std::uint64_t>(i));
    ys[i] = rng.uniform(0, 2 * static_cast<std::uint64_t>(i) + 1);
  }

  // Grid binning at cell size >= r; each unordered pair is examined once.
  // The cell count is capped at sqrt(N) per axis so memory stays O(N) even
  // for tiny radii (wider cells only cost extra distance checks).
  const int max_cells = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(N))));
  const int cells = std::max(1, std::min(max_cells, static_cast<int>(1.0 / r)));
  const double cw = 1.0 / cells;
  std::vector<std::vector<int>> grid(static_cast<size_t>(cells) * cells);
  auto cellOf = [&](Index i) {
    int cx = std::min(cells - 1, static_cast<int>(xs[i] / cw));
    int cy = std::min(cells - 1, static_cast<int>(ys[i] / cw));
    return cy * cells + cx;
  };
  for (Index i = 0; i < N; ++i) grid[cellOf(i)].push_back(static_cast<int>(i));

  std::vector<std::tuple<Index, Index, double>> edges;
  UnionFind uf(static_cast<int>(N));
  const double r2 = r * r;
  for (Index i = 0; i < N; ++i) {
    int cx = std::min(cells - 1, static_cast<int>(xs[i] / cw));
    int cy = std::min(cells - 1, static_cast<int>(ys[i] / cw));
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        int nx = cx + dx, ny = cy + dy;
        if (nx < 0 || ny < 0 || nx >= cells || ny >= cells) continue;
        for (int j : grid[static_cast<size_t>(ny) * cells + nx]) {
          if (j <= static_cast<int>(i)) continue;
          double ddx = xs[i] - xs[j], ddy = ys[i] - ys[j];
          if (ddx * ddx + ddy * ddy < r2) {
            // Weight addressed by the pair, not by discovery order.
            double w = spec.w_max *
                       rng.uniform(1, static_cast<std::uint64_t>(i) * N + j);
            edges.emplace_back(i, static_cast<Index>(j), w);
            uf.unite(static_cast<int>(i), j);
          }
        }
      }
    }
  }

  SparseSymMatrix L = graphLaplacian(N, edges);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(L.nonZeros() + 1);
  for (int c = 0; c < L.lower().outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(L.lower(), c); it; ++it)
      trip.emplace_back(static_cast<Index>(it.row()), static_cast<Index>(it.col()), it.value());
  }
  trip.emplace_back(N, N, -spec.gamma);

  TestMatrixSample out{SparseSymMatrix::fromTriplets(N + 1, trip), true,
                       static_cast<long>(edges.size())};
  int root = uf.find(0);
  for (Index i = 1; i < N && out.connected; ++i)
    if (uf.find(static_cast<int>(i)) != root) out.connected = false;
  return out;
}

}  // namespace certeig
