#include "certeig/factor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/OrderingMethods>

namespace certeig {

namespace {
constexpr double kBunchKaufmanAlpha = 0.6403882032022076;  // (1 + sqrt(17)) / 8
}

Eigen::VectorXi amdOrdering(const SparseSymMatrix& M) {
  const Index n = M.rows();
  Eigen::SparseMatrix<double> F = M.full();
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> P;
  Eigen::AMDOrdering<int> amd;
  amd(F, P);
  // Matches Eigen's SimplicialCholesky usage of AMD: position t of the
  // permuted matrix holds original index P.indices()(t). Eigen's AMD leaves
  // isolated vertices at the end; minimum-degree logic eliminates degree-0
  // columns first (they cause no fill), so move them to the front.
  std::vector<char> isolated(n, 1);
  for (int c = 0; c < F.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(F, c); it; ++it)
      if (it.row() != it.col()) isolated[it.row()] = isolated[it.col()] = 0;
  Eigen::VectorXi pos2orig(n);
  const auto& idx = P.indices();
  Index t = 0;
  for (Index s = 0; s < n; ++s)
    if (isolated[idx[s]]) pos2orig[t++] = idx[s];
  for (Index s = 0; s < n; ++s)
    if (!isolated[idx[s]]) pos2orig[t++] = idx[s];
  return pos2orig;
}

double CholeskyFactor::quadForm(const Eigen::Ref<const Eigen::VectorXd>& z) const {
  const Index n = static_cast<Index>(perm.size());
  Eigen::VectorXd zp(n);
  for (Index t = 0; t < n; ++t) zp[t] = z[perm[t]];
  Eigen::VectorXd w = L.transpose() * zp;
  return w.squaredNorm();
}

CholeskyOutcome attemptCholesky(const SparseSymMatrix& M) {
  const Index n = M.rows();
  Eigen::VectorXi perm = amdOrdering(M);
  Eigen::VectorXi iperm(n);
  for (Index t = 0; t < n; ++t) iperm[perm[t]] = t;

  // Permuted lower triangle, CSC.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(M.nonZeros());
  const auto& ML = M.lower();
  for (int c = 0; c < ML.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(ML, c); it; ++it) {
      Index pi = iperm[it.row()], pj = iperm[it.col()];
      trip.emplace_back(std::max(pi, pj), std::min(pi, pj), it.value());
    }
  }
  Eigen::SparseMatrix<double> Ap(n, n);
  Ap.setFromTriplets(trip.begin(), trip.end());
  Ap.makeCompressed();

  const double thresh =
      static_cast<double>(n) * std::numeric_limits<double>::epsilon() * M.maxAbsDiag();

  if (!Ap.coeffs().allFinite()) throw NumericalError("attemptCholesky: non-finite entries");

  std::vector<std::vector<std::pair<int, double>>> cols(n);   // strictly-below entries
  std::vector<double> diag(n, 0.0);
  std::vector<std::vector<std::pair<int, double>>> rowlist(n);  // (col, L(row,col))
  std::vector<int> cursor(n, 0);

  Eigen::VectorXd spa = Eigen::VectorXd::Zero(n);
  std::vector<char> flag(n, 0);
  std::vector<int> pattern;
  pattern.reserve(64);

  for (Index j = 0; j < n; ++j) {
    pattern.clear();
    auto touch = [&](int i, double v) {
      if (!flag[i]) {
        flag[i] = 1;
        spa[i] = v;
        pattern.push_back(i);
      } else {
        spa[i] += v;
      }
    };
    touch(j, 0.0);
    for (Eigen::SparseMatrix<double>::InnerIterator it(Ap, j); it; ++it)
      touch(static_cast<int>(it.row()), it.value());

    for (const auto& [k, ljk] : rowlist[j]) {
      auto& ck = cols[k];
      int& cur = cursor[k];
      while (cur < static_cast<int>(ck.size()) && ck[cur].first < j) ++cur;
      for (int idx = cur; idx < static_cast<int>(ck.size()); ++idx)
        touch(ck[idx].first, -ck[idx].second * ljk);
    }

    double d = spa[j];
    if (!(d > thresh)) {
      if (!std::isfinite(d)) throw NumericalError("attemptCholesky: non-finite pivot");
      return IndefiniteSignal{static_cast<int>(j)};
    }
    d = std::sqrt(d);
    diag[j] = d;
    std::sort(pattern.begin(), pattern.end());
    auto& cj = cols[j];
    for (int i : pattern) {
      if (i > j && spa[i] != 0.0) {
        double lij = spa[i] / d;
        cj.emplace_back(i, lij);
        rowlist[i].emplace_back(static_cast<int>(j), lij);
      }
      flag[i] = 0;
      spa[i] = 0.0;
    }
  }

  std::vector<Eigen::Triplet<double>> lt;
  size_t nnzL = n;
  for (const auto& c : cols) nnzL += c.size();
  lt.reserve(nnzL);
  for (Index j = 0; j < n; ++j) {
    lt.emplace_back(j, j, diag[j]);
    for (const auto& [i, v] : cols[j]) lt.emplace_back(i, j, v);
  }
  CholeskyFactor out;
  out.perm = std::move(perm);
  out.L.resize(n, n);
  out.L.setFromTriplets(lt.begin(), lt.end());
  out.L.makeCompressed();
  return out;
}

Eigen::MatrixXd DiagBlock::dense() const {
  if (size == 1) {
    Eigen::MatrixXd D(1, 1);
    D(0, 0) = d11;
    return D;
  }
  Eigen::MatrixXd D(2, 2);
  D << d11, d21, d21, d22;
  return D;
}

Eigen::MatrixXd BlockDiagFactorization::reconstructPermutedScaled() const {
  const Index n = static_cast<Index>(perm.size());
  Eigen::MatrixXd Ld = Eigen::MatrixXd(L);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (const auto& b : blocks) {
    D(b.start, b.start) = b.d11;
    if (b.size == 2) {
      D(b.start + 1, b.start) = b.d21;
      D(b.start, b.start + 1) = b.d21;
      D(b.start + 1, b.start + 1) = b.d22;
    }
  }
  return Ld * D * Ld.transpose();
}

std::pair<int, int> BlockDiagFactorization::inertia() const {
  int pos = 0, neg = 0;
  for (const auto& b : blocks) {
    if (b.size == 1) {
      (b.d11 > 0 ? pos : neg)++;
    } else {
      double det = b.d11 * b.d22 - b.d21 * b.d21;
      if (det < 0) {
        ++pos;
        ++neg;
      } else if (b.d11 + b.d22 > 0) {
        pos += 2;
      } else {
        neg += 2;
      }
    }
  }
  return {pos, neg};
}

BlockDiagFactorization ildl(const SparseSymMatrix& M, const IldlOptions& opts) {
  const Index n = M.rows();
  BlockDiagFactorization out;

  // Symmetric max-norm equilibration.
  Eigen::VectorXd rowmax = Eigen::VectorXd::Zero(n);
  const auto& ML = M.lower();
  for (int c = 0; c < ML.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(ML, c); it; ++it) {
      double a = std::abs(it.value());
      rowmax[it.row()] = std::max(rowmax[it.row()], a);
      rowmax[it.col()] = std::max(rowmax[it.col()], a);
    }
  }
  Eigen::VectorXd s(n);
  for (Index i = 0; i < n; ++i)
    s[i] = (opts.equilibrate && rowmax[i] > 0.0) ? 1.0 / std::sqrt(rowmax[i]) : 1.0;
  out.scaling = s;

  // Scaled full matrix, CSC by original column.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(2 * M.nonZeros());
  for (int c = 0; c < ML.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(ML, c); it; ++it) {
      double v = it.value() * s[it.row()] * s[it.col()];
      trip.emplace_back(it.row(), it.col(), v);
      if (it.row() != it.col()) trip.emplace_back(it.col(), it.row(), v);
    }
  }
  Eigen::SparseMatrix<double> F(n, n);
  F.setFromTriplets(trip.begin(), trip.end());
  F.makeCompressed();

  int fill_limit = opts.fill_limit;
  if (fill_limit < 0) {
    double avg = n > 0 ? static_cast<double>(F.nonZeros()) / static_cast<double>(n) : 0.0;
    fill_limit = std::max(4, static_cast<int>(2.0 * avg));
  }

  const double pivtol = static_cast<double>(n) * std::numeric_limits<double>::epsilon() *
                        std::max(1.0, F.nonZeros() > 0 ? F.coeffs().cwiseAbs().maxCoeff() : 1.0);

  Eigen::VectorXi p = amdOrdering(M);
  Eigen::VectorXi ip(n);
  for (Index t = 0; t < n; ++t) ip[p[t]] = t;

  std::vector<std::vector<std::pair<int, double>>> cols(n);     // original row index -> value
  std::vector<std::vector<std::pair<int, double>>> rowlist(n);  // (col position, value)
  std::vector<int> blockOfCol(n, -1);
  std::vector<long> blockStamp;
  long stamp = 0;

  Eigen::VectorXd spaC = Eigen::VectorXd::Zero(n), spaR = Eigen::VectorXd::Zero(n);
  std::vector<char> flagC(n, 0), flagR(n, 0);
  std::vector<int> patC, patR;

  // Schur-complement column of the (scaled, permuted) matrix for original
  // index c, restricted to not-yet-eliminated rows.
  auto schurColumn = [&](int c, int t, Eigen::VectorXd& spa, std::vector<char>& flag,
                         std::vector<int>& pat) {
    pat.clear();
    auto touch = [&](int i, double v) {
      if (!flag[i]) {
        flag[i] = 1;
        spa[i] = v;
        pat.push_back(i);
      } else {
        spa[i] += v;
      }
    };
    touch(c, 0.0);
    for (Eigen::SparseMatrix<double>::InnerIterator it(F, c); it; ++it) {
      if (ip[it.row()] >= t) touch(static_cast<int>(it.row()), it.value());
    }
    ++stamp;
    const auto& rl = rowlist[c];
    for (const auto& [kpos, lval] : rl) {
      int bid = blockOfCol[kpos];
      if (blockStamp[bid] == stamp) continue;
      blockStamp[bid] = stamp;
      const DiagBlock& b = out.blocks[bid];
      if (b.size == 1) {
        double coeff = b.d11 * lval;
        for (const auto& [i, v] : cols[kpos]) {
          if (ip[i] >= t) touch(i, -v * coeff);
        }
      } else {
        // Gather L(c, start) and L(c, start+1).
        double lc0 = 0.0, lc1 = 0.0;
        for (const auto& [kp2, lv2] : rl) {
          if (kp2 == b.start) lc0 = lv2;
          if (kp2 == b.start + 1) lc1 = lv2;
        }
        double m0 = b.d11 * lc0 + b.d21 * lc1;
        double m1 = b.d21 * lc0 + b.d22 * lc1;
        if (m0 != 0.0) {
          for (const auto& [i, v] : cols[b.start]) {
            if (ip[i] >= t) touch(i, -v * m0);
          }
        }
        if (m1 != 0.0) {
          for (const auto& [i, v] : cols[b.start + 1]) {
            if (ip[i] >= t) touch(i, -v * m1);
          }
        }
      }
    }
  };

  auto clearSpa = [&](Eigen::VectorXd& spa, std::vector<char>& flag, std::vector<int>& pat) {
    for (int i : pat) {
      flag[i] = 0;
      spa[i] = 0.0;
    }
    pat.clear();
  };

  // Keeps the fill_limit largest-magnitude candidates above the drop
  // threshold; returns kept (row, magnitude-keyed value index) pairs.
  struct Candidate {
    int row;
    double mag;
  };

  auto storeColumn = [&](int tpos, const std::vector<std::pair<int, double>>& entries) {
    auto sorted = entries;
    std::sort(sorted.begin(), sorted.end());
    auto& cj = cols[tpos];
    cj = std::move(sorted);
    for (const auto& [i, v] : cj) rowlist[i].emplace_back(tpos, v);
  };

  int t = 0;
  while (t < n) {
    int c = p[t];
    schurColumn(c, t, spaC, flagC, patC);
    double acc = spaC[c];

    double omega = 0.0;
    int r = -1;
    for (int i : patC) {
      if (i == c || ip[i] < t) continue;
      double a = std::abs(spaC[i]);
      if (a > omega || (a == omega && r >= 0 && i < r)) {
        omega = a;
        r = i;
      }
    }

    bool take1x1 = (omega == 0.0) || (std::abs(acc) >= kBunchKaufmanAlpha * omega);
    if (take1x1) {
      if (std::abs(acc) <= pivtol) {
        if (omega == 0.0)
          throw PivotBreakdown("ildl: zero pivot column at position " + std::to_string(t));
        take1x1 = false;  // fall through to the 2x2 branch below
      }
    }

    if (take1x1) {
      // Gather, drop, scale.
      std::vector<Candidate> cand;
      double colnorm2 = 0.0;
      for (int i : patC) {
        if (i == c || ip[i] < t || spaC[i] == 0.0) continue;
        double a = std::abs(spaC[i]);
        colnorm2 += a * a;
        cand.push_back({i, a});
      }
      double dropthr = opts.drop_tol * std::sqrt(colnorm2);
      std::vector<Candidate> kept;
      for (const auto& cd : cand) {
        if (cd.mag >= dropthr)
          kept.push_back(cd);
        else
          ++out.dropped;
      }
      if (static_cast<int>(kept.size()) > fill_limit) {
        std::nth_element(kept.begin(), kept.begin() + fill_limit, kept.end(),
                         [](const Candidate& a, const Candidate& b) {
                           return a.mag > b.mag || (a.mag == b.mag && a.row < b.row);
                         });
        out.dropped += static_cast<long>(kept.size()) - fill_limit;
        kept.resize(fill_limit);
      }
      std::vector<std::pair<int, double>> entries;
      entries.reserve(kept.size());
      for (const auto& cd : kept) entries.emplace_back(cd.row, spaC[cd.row] / acc);

      DiagBlock b;
      b.start = t;
      b.size = 1;
      b.d11 = acc;
      blockOfCol[t] = static_cast<int>(out.blocks.size());
      out.blocks.push_back(b);
      blockStamp.push_back(0);
      storeColumn(t, entries);
      clearSpa(spaC, flagC, patC);
      t += 1;
      continue;
    }

    // 2x2 pivot with partner row r.
    schurColumn(r, t, spaR, flagR, patR);
    double arr = spaR[r];
    double acr = spaC[r];
    double det = acc * arr - acr * acr;

    double omega_r = 0.0;
    for (int i : patR) {
      if (i == r || ip[i] < t) continue;
      omega_r = std::max(omega_r, std::abs(spaR[i]));
    }
    const bool det_bad =
        std::abs(det) <= pivtol * std::max({std::abs(acc), std::abs(arr), std::abs(acr), 1.0});
    // Growth-control tests: prefer a 1x1 pivot on c when |acc|*omega_r >=
    // alpha*omega^2, else a 1x1 on r when |arr| >= alpha*omega_r; only the
    // remaining case guarantees a well-proportioned 2x2 block.
    const bool take_c =
        std::abs(acc) > pivtol && std::abs(acc) * omega_r >= kBunchKaufmanAlpha * omega * omega;
    const bool take_r =
        !take_c && std::abs(arr) > pivtol && std::abs(arr) >= kBunchKaufmanAlpha * omega_r;

    if (take_c || take_r || det_bad) {
      // 1x1 on whichever diagonal candidate is usable.
      if (!take_c &&
          (take_r || (std::abs(arr) > std::abs(acc) && std::abs(arr) > pivtol))) {
        // Bring r to position t and pivot on it.
        int tr = ip[r];
        std::swap(p[t], p[tr]);
        ip[p[t]] = t;
        ip[p[tr]] = tr;
        clearSpa(spaC, flagC, patC);
        clearSpa(spaR, flagR, patR);
        continue;  // recompute; next pass takes the 1x1 on r
      }
      if (std::abs(acc) <= pivtol) {
        throw PivotBreakdown("ildl: singular 2x2 pivot block at position " + std::to_string(t));
      }
      // 1x1 on c despite the alpha test; rebuild its column directly.
      std::vector<Candidate> cand;
      double colnorm2 = 0.0;
      for (int i : patC) {
        if (i == c || ip[i] < t || spaC[i] == 0.0) continue;
        double a = std::abs(spaC[i]);
        colnorm2 += a * a;
        cand.push_back({i, a});
      }
      double dropthr = opts.drop_tol * std::sqrt(colnorm2);
      std::vector<std::pair<int, double>> entries;
      std::vector<Candidate> kept;
      for (const auto& cd : cand) {
        if (cd.mag >= dropthr)
          kept.push_back(cd);
        else
          ++out.dropped;
      }
      if (static_cast<int>(kept.size()) > fill_limit) {
        std::nth_element(kept.begin(), kept.begin() + fill_limit, kept.end(),
                         [](const Candidate& a, const Candidate& b) {
                           return a.mag > b.mag || (a.mag == b.mag && a.row < b.row);
                         });
        out.dropped += static_cast<long>(kept.size()) - fill_limit;
        kept.resize(fill_limit);
      }
      for (const auto& cd : kept) entries.emplace_back(cd.row, spaC[cd.row] / acc);
      DiagBlock b;
      b.start = t;
      b.size = 1;
      b.d11 = acc;
      blockOfCol[t] = static_cast<int>(out.blocks.size());
      out.blocks.push_back(b);
      blockStamp.push_back(0);
      storeColumn(t, entries);
      clearSpa(spaC, flagC, patC);
      clearSpa(spaR, flagR, patR);
      t += 1;
      continue;
    }

    // Swap r into position t + 1.
    int tr = ip[r];
    if (tr != t + 1) {
      std::swap(p[t + 1], p[tr]);
      ip[p[t + 1]] = t + 1;
      ip[p[tr]] = tr;
    }

    double i00 = arr / det, i01 = -acr / det, i11 = acc / det;

    std::vector<Candidate> cand;
    double colnorm2 = 0.0;
    for (int i : patC) {
      if (!flagR[i]) {
        flagR[i] = 1;
        spaR[i] += 0.0;
        patR.push_back(i);
      }
    }
    for (int i : patR) {
      if (i == c || i == r || ip[i] < t) continue;
      double a0 = flagC[i] ? spaC[i] : 0.0;
      double a1 = spaR[i];
      double mag = std::sqrt(a0 * a0 + a1 * a1);
      if (mag == 0.0) continue;
      colnorm2 += mag * mag;
      cand.push_back({i, mag});
    }
    double dropthr = opts.drop_tol * std::sqrt(colnorm2);
    std::vector<Candidate> kept;
    for (const auto& cd : cand) {
      if (cd.mag >= dropthr)
        kept.push_back(cd);
      else
        out.dropped += 2;
    }
    if (static_cast<int>(kept.size()) > fill_limit) {
      std::nth_element(kept.begin(), kept.begin() + fill_limit, kept.end(),
                       [](const Candidate& a, const Candidate& b) {
                         return a.mag > b.mag || (a.mag == b.mag && a.row < b.row);
                       });
      out.dropped += 2 * (static_cast<long>(kept.size()) - fill_limit);
      kept.resize(fill_limit);
    }
    std::vector<std::pair<int, double>> e0, e1;
    for (const auto& cd : kept) {
      int i = cd.row;
      double a0 = flagC[i] ? spaC[i] : 0.0;
      double a1 = spaR[i];
      double l0 = a0 * i00 + a1 * i01;
      double l1 = a0 * i01 + a1 * i11;
      if (l0 != 0.0) e0.emplace_back(i, l0);
      if (l1 != 0.0) e1.emplace_back(i, l1);
    }

    DiagBlock b;
    b.start = t;
    b.size = 2;
    b.d11 = acc;
    b.d21 = acr;
    b.d22 = arr;
    int bid = static_cast<int>(out.blocks.size());
    blockOfCol[t] = bid;
    blockOfCol[t + 1] = bid;
    out.blocks.push_back(b);
    blockStamp.push_back(0);
    storeColumn(t, e0);
    storeColumn(t + 1, e1);
    clearSpa(spaC, flagC, patC);
    clearSpa(spaR, flagR, patR);
    t += 2;
  }

  // Assemble L in final position space.
  std::vector<Eigen::Triplet<double>> lt;
  size_t nnzL = n;
  for (const auto& cj : cols) nnzL += cj.size();
  lt.reserve(nnzL);
  for (Index j = 0; j < n; ++j) {
    lt.emplace_back(j, j, 1.0);
    for (const auto& [i, v] : cols[j]) lt.emplace_back(ip[i], j, v);
  }
  out.L.resize(n, n);
  out.L.setFromTriplets(lt.begin(), lt.end());
  out.L.makeCompressed();
  out.perm = std::move(p);
  return out;
}

}  // namespace certeig
