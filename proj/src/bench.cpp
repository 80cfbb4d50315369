#include "certeig/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "certeig/matrix_market.hpp"
#include "certeig/rng.hpp"
#include "certeig/testgen.hpp"
#include "certeig/verify.hpp"

namespace certeig {

std::string methodName(Method m) {
  switch (m) {
    case Method::LobpcgPrecond: return "lobpcg-precond";
    case Method::LobpcgPlain: return "lobpcg-plain";
    case Method::LanczosShifted: return "lanczos-shifted";
  }
  return "?";
}

SweepKind sweepKindFromName(const std::string& name) {
  if (name == "gap") return SweepKind::Gap;
  if (name == "size") return SweepKind::Size;
  if (name == "file") return SweepKind::File;
  throw ConstructionError("unknown sweep kind: " + name);
}

namespace {

const char* sweepName(SweepKind k) {
  switch (k) {
    case SweepKind::Gap: return "gap";
    case SweepKind::Size: return "size";
    case SweepKind::File: return "file";
  }
  return "?";
}

TrialRecord runOne(const SparseSymMatrix& S, Method method, const ExperimentPlan& plan,
                   std::uint64_t seed) {
  TrialRecord rec;
  rec.method = methodName(method);
  rec.seed = seed;
  double eta = plan.eta > 0.0 ? plan.eta : defaultEta(S);
  rec.eta = eta;

  VerifyConfig cfg;
  cfg.tol = plan.tol;
  cfg.blocksize = plan.blocksize;
  cfg.lobpcg_max_iterations = plan.lobpcg_max_iterations;
  cfg.lanczos_max_matvecs = plan.lanczos_max_matvecs;
  cfg.ildl_opts = plan.ildl_opts;
  cfg.seed = seed;

  VerifyStats stats;
  try {
    auto t0 = std::chrono::steady_clock::now();
    VerificationOutcome out =
        method == Method::LanczosShifted
            ? lanczosVerification(S, eta, cfg, &stats)
            : fastVerification(S, eta, cfg, &stats, method == Method::LobpcgPrecond);
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (std::holds_alternative<Certificate>(out)) {
      rec.outcome = "certificate";
      rec.lambda = 0.0;
    } else {
      rec.outcome = "negative-curvature";
      rec.lambda = std::get<NegativeCurvature>(out).lambda;
    }
    rec.iterations = stats.iterations;
    rec.matvecs = stats.matvecs;
    rec.precond_applies = stats.precond_applies;
    rec.precond_build_seconds = stats.precond_build_seconds;
    rec.cholesky_attempt_seconds = stats.cholesky_attempt_seconds;
    rec.converged = stats.converged;
    rec.eta = stats.eta_used;
  } catch (const std::exception& e) {
    rec.outcome = std::string("error:") + e.what();
    rec.lambda = std::nan("");
    rec.converged = false;
  }
  return rec;
}

}  // namespace

std::vector<TrialRecord> runSweep(const ExperimentPlan& plan) {
  if (plan.trials < 1) throw ConstructionError("runSweep: trials must be >= 1");

  struct Point {
    double param;
    std::string file;
  };
  std::vector<Point> points;
  switch (plan.kind) {
    case SweepKind::Gap:
      for (double g : plan.gamma_grid) points.push_back({g, ""});
      break;
    case SweepKind::Size:
      for (Index n : plan.size_grid) points.push_back({static_cast<double>(n), ""});
      break;
    case SweepKind::File:
      for (size_t i = 0; i < plan.files.size(); ++i)
        points.push_back({static_cast<double>(i), plan.files[i]});
      break;
  }
  if (points.empty()) throw ConstructionError("runSweep: empty parameter grid");
  if (plan.methods.empty()) throw ConstructionError("runSweep: no methods requested");

  const int trials = plan.trials;
  const size_t nm = plan.methods.size();
  std::vector<TrialRecord> records(points.size() * trials * nm);

  CounterRng master(plan.master_seed);

  auto runTask = [&](size_t pi, int trial) {
    const Point& pt = points[pi];
    std::uint64_t matrix_seed = master.derive(100, pi * 1000003ULL + static_cast<std::uint64_t>(trial));
    std::uint64_t solver_seed = master.derive(101, pi * 1000003ULL + static_cast<std::uint64_t>(trial));

    SparseSymMatrix S;
    std::string sample_error;
    try {
      if (plan.kind == SweepKind::File) {
        S = readMatrixMarket(pt.file);
      } else {
        TestMatrixSpec spec;
        spec.N = plan.kind == SweepKind::Gap ? plan.N : static_cast<Index>(pt.param);
        spec.gamma = plan.kind == SweepKind::Gap ? pt.param : plan.gamma;
        spec.seed = matrix_seed;
        S = sampleTestMatrix(spec).S;
      }
    } catch (const std::exception& e) {
      sample_error = e.what();
    }

    for (size_t mi = 0; mi < nm; ++mi) {
      size_t idx = (pi * trials + static_cast<size_t>(trial)) * nm + mi;
      TrialRecord rec;
      if (!sample_error.empty()) {
        rec.method = methodName(plan.methods[mi]);
        rec.outcome = "error:" + sample_error;
        rec.lambda = std::nan("");
        rec.seed = solver_seed;
      } else {
        rec = runOne(S, plan.methods[mi], plan, solver_seed);
      }
      rec.sweep = sweepName(plan.kind);
      rec.param = pt.param;
      rec.file = pt.file;
      rec.trial = trial;
      records[idx] = std::move(rec);
    }
  };

  std::vector<std::pair<size_t, int>> tasks;
  for (size_t pi = 0; pi < points.size(); ++pi)
    for (int t = 0; t < trials; ++t) tasks.emplace_back(pi, t);

  int workers = std::max(1, plan.workers);
  if (workers == 1) {
    for (auto& [pi, t] : tasks) runTask(pi, t);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          size_t i = next.fetch_add(1);
          if (i >= tasks.size()) return;
          runTask(tasks[i].first, tasks[i].second);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  return records;
}

std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records) {
  // Group by (param, method), preserving first-seen order.
  std::vector<SummaryRow> out;
  std::vector<std::vector<const TrialRecord*>> groups;
  auto key_index = [&](const TrialRecord& r) -> size_t {
    for (size_t i = 0; i < out.size(); ++i)
      if (out[i].param == r.param && out[i].method == r.method) return i;
    SummaryRow s;
    s.sweep = r.sweep;
    s.param = r.param;
    s.method = r.method;
    out.push_back(s);
    groups.emplace_back();
    return out.size() - 1;
  };
  for (const auto& r : records) {
    if (r.outcome.rfind("error:", 0) == 0) continue;
    groups[key_index(r)].push_back(&r);
  }
  for (size_t i = 0; i < out.size(); ++i) {
    const auto& g = groups[i];
    SummaryRow& s = out[i];
    s.trials = static_cast<int>(g.size());
    if (g.empty()) continue;
    double n = static_cast<double>(g.size());
    double mt = 0, mi = 0;
    for (auto* r : g) {
      mt += r->wall_seconds;
      mi += static_cast<double>(r->iterations);
    }
    mt /= n;
    mi /= n;
    double vt = 0, vi = 0;
    for (auto* r : g) {
      vt += (r->wall_seconds - mt) * (r->wall_seconds - mt);
      vi += (static_cast<double>(r->iterations) - mi) * (static_cast<double>(r->iterations) - mi);
    }
    double set = g.size() > 1 ? std::sqrt(vt / (n - 1) / n) : 0.0;
    double sei = g.size() > 1 ? std::sqrt(vi / (n - 1) / n) : 0.0;
    s.mean_wall_seconds = mt;
    s.ci95_wall_seconds = 1.959963984540054 * set;
    s.mean_iterations = mi;
    s.ci95_iterations = 1.959963984540054 * sei;
    std::vector<double> times;
    times.reserve(g.size());
    for (auto* r : g) times.push_back(r->wall_seconds);
    std::sort(times.begin(), times.end());
    s.median_wall_seconds = times[times.size() / 2];
  }
  return out;
}

void writeCsv(const std::vector<TrialRecord>& records, const std::vector<SummaryRow>& summaries,
              const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConstructionError("writeCsv: cannot open " + path);
  out << "# certeig-csv-v1\n";
  out << "row,sweep,param,file,trial,method,outcome,lambda,wall_seconds,iterations,matvecs,"
         "precond_applies,precond_build_seconds,cholesky_attempt_seconds,converged,seed,eta,"
         "mean_wall_seconds,ci95_wall_seconds,mean_iterations,ci95_iterations,"
         "median_wall_seconds\n";
  char buf[64];
  auto num = [&buf](double v, const char* fmt) {
    std::snprintf(buf, sizeof(buf), fmt, v);
    return std::string(buf);
  };
  for (const auto& r : records) {
    out << "trial," << r.sweep << "," << num(r.param, "%.17g") << "," << r.file << "," << r.trial
        << "," << r.method << "," << r.outcome << "," << num(r.lambda, "%.17g") << ","
        << num(r.wall_seconds, "%.6f") << "," << r.iterations << "," << r.matvecs << ","
        << r.precond_applies << "," << num(r.precond_build_seconds, "%.6f") << ","
        << num(r.cholesky_attempt_seconds, "%.6f") << "," << (r.converged ? 1 : 0) << "," << r.seed
        << "," << num(r.eta, "%.17g") << ",,,,,\n";
  }
  for (const auto& s : summaries) {
    out << "summary," << s.sweep << "," << num(s.param, "%.17g") << ",," << s.trials << ","
        << s.method << ",,,,,,,,,,,," << num(s.mean_wall_seconds, "%.6f") << ","
        << num(s.ci95_wall_seconds, "%.6f") << "," << num(s.mean_iterations, "%.6f") << ","
        << num(s.ci95_iterations, "%.6f") << "," << num(s.median_wall_seconds, "%.6f") << "\n";
  }
}

std::string emitPlotScript(const std::string& csv_path) {
  {
    std::ifstream in(csv_path);
    if (!in) throw ConstructionError("emitPlotScript: cannot open " + csv_path);
    std::string line;
    bool has_summary = false, is_gap = false;
    while (std::getline(in, line)) {
      if (line.rfind("summary,", 0) == 0) {
        has_summary = true;
        if (line.find(",gap,") != std::string::npos) is_gap = true;
      } else if (line.rfind("trial,gap", 0) == 0) {
        is_gap = true;
      }
    }
    if (!has_summary) throw ConstructionError("emitPlotScript: CSV has no summary rows");
    (void)is_gap;
  }
  std::filesystem::path p(csv_path);
  std::filesystem::path script = p;
  script.replace_extension(".plot.py");
  std::ofstream out(script);
  out << R"PY(#!/usr/bin/env python3
"""Plots mean verification time and iteration curves from a sweep CSV."""
import csv
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

CSV = r")PY"
      << p.filename().string() << R"PY("

rows = []
with open(CSV) as fh:
    for row in csv.reader(line for line in fh if not line.startswith("#")):
        rows.append(row)
header, rows = rows[0], rows[1:]
col = {name: i for i, name in enumerate(header)}

summaries = [r for r in rows if r[col["row"]] == "summary"]
if not summaries:
    sys.exit("no summary rows in CSV")
sweep = summaries[0][col["sweep"]]
methods = sorted({r[col["method"]] for r in summaries})

fig, (ax_t, ax_i) = plt.subplots(1, 2, figsize=(11, 4.2))
for m in methods:
    pts = sorted(
        (float(r[col["param"]]),
         float(r[col["mean_wall_seconds"]]),
         float(r[col["ci95_wall_seconds"]]),
         float(r[col["mean_iterations"]]),
         float(r[col["ci95_iterations"]]))
        for r in summaries if r[col["method"]] == m)
    x = [p[0] for p in pts]
    ax_t.plot(x, [p[1] for p in pts], marker="o", label=m)
    ax_t.fill_between(x, [p[1] - p[2] for p in pts], [p[1] + p[2] for p in pts], alpha=0.2)
    ax_i.plot(x, [p[3] for p in pts], marker="o", label=m)
    ax_i.fill_between(x, [p[3] - p[4] for p in pts], [p[3] + p[4] for p in pts], alpha=0.2)

xlabel = {"gap": "eigenvalue gap", "size": "problem size N", "file": "file index"}[sweep]
for ax, ylabel in ((ax_t, "verification time [s]"), (ax_i, "iterations")):
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if sweep == "gap":
        ax.set_xscale("log")
    ax.set_yscale("log")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
fig.tight_layout()
outfile = CSV.rsplit(".", 1)[0] + ".png"
fig.savefig(outfile, dpi=150)
print(outfile)
)PY";
  if (!out) throw ConstructionError("emitPlotScript: write failed");
  return script.string();
}

namespace {

std::string runAndWrite(ExperimentPlan plan, const std::string& out_dir, const char* stem) {
  std::filesystem::create_directories(out_dir);
  std::vector<TrialRecord> records = runSweep(plan);
  std::vector<SummaryRow> summaries = summarize(records);
  std::filesystem::path csv = std::filesystem::path(out_dir) / (std::string(stem) + ".csv");
  writeCsv(records, summaries, csv.string());
  return csv.string();
}

}  // namespace

std::string runGapSweep(ExperimentPlan plan, const std::string& out_dir) {
  plan.kind = SweepKind::Gap;
  return runAndWrite(std::move(plan), out_dir, "gap_sweep");
}

std::string runSizeSweep(ExperimentPlan plan, const std::string& out_dir) {
  plan.kind = SweepKind::Size;
  return runAndWrite(std::move(plan), out_dir, "size_sweep");
}

std::string runFileSweep(ExperimentPlan plan, const std::string& out_dir) {
  plan.kind = SweepKind::File;
  return runAndWrite(std::move(plan), out_dir, "verify_file");
}

}  // namespace certeig
