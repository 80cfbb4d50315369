#pragma once

#include <string>
#include <vector>

#include "certeig/factor.hpp"
#include "certeig/sparse_core.hpp"

namespace certeig {

enum class SweepKind { Gap, Size, File };
enum class Method { LobpcgPrecond, LobpcgPlain, LanczosShifted };

std::string methodName(Method m);
SweepKind sweepKindFromName(const std::string& name);

struct ExperimentPlan {
  SweepKind kind = SweepKind::Gap;
  std::vector<double> gamma_grid{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  std::vector<Index> size_grid{1000, 2000, 4000, 8000};
  std::vector<std::string> files;
  Index N = 2000;          // fixed problem size for the gap sweep
  double gamma = 1e-2;     // fixed gap for the size sweep
  int trials = 50;
  std::vector<Method> methods{Method::LobpcgPrecond, Method::LobpcgPlain, Method::LanczosShifted};
  double tol = 1e-2;
  double eta = -1.0;       // <= 0 -> defaultEta per matrix
  int blocksize = 5;
  int lobpcg_max_iterations = 500;
  long lanczos_max_matvecs = 20000;
  IldlOptions ildl_opts{};
  std::uint64_t master_seed = 0;
  int workers = 1;
};

struct TrialRecord {
  std::string sweep;    // gap | size | file
  double param = 0.0;   // gamma, N, or file index
  std::string file;     // file sweep only
  int trial = 0;
  std::string method;
  std::string outcome;  // certificate | negative-curvature | error:<what>
  double lambda = 0.0;
  double wall_seconds = 0.0;      // verification only: factorization + eigensolve
  long iterations = 0;
  long matvecs = 0;
  long precond_applies = 0;
  double precond_build_seconds = 0.0;
  double cholesky_attempt_seconds = 0.0;
  bool converged = false;
  std::uint64_t seed = 0;
  double eta = 0.0;
};

struct SummaryRow {
  std::string sweep;
  double param = 0.0;
  std::string method;
  int trials = 0;
  double mean_wall_seconds = 0.0;
  double ci95_wall_seconds = 0.0;
  double mean_iterations = 0.0;
  double ci95_iterations = 0.0;
  double median_wall_seconds = 0.0;
};

/// Runs the plan: for every grid point and trial the same sampled matrix is
/// handed to every requested method. Individual trial failures are recorded
/// as error rows, never aborting the sweep. Records come back in grid order
/// regardless of the worker count.
std::vector<TrialRecord> runSweep(const ExperimentPlan& plan);

/// Per (grid point, method) means with 95% normal-approximation confidence
/// intervals over the trials that did not error.
std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records);

/// Trial rows followed by summary rows, under a versioned header comment.
/// Timings carry 6 decimals; everything else is written bit-reproducibly.
void writeCsv(const std::vector<TrialRecord>& records, const std::vector<SummaryRow>& summaries,
              const std::string& path);

/// Self-contained matplotlib script (time and iterations vs. the sweep
/// parameter, CI shading, one curve per method, log axes for gap sweeps).
/// Returns the script path. Throws if the CSV lacks summary rows.
std::string emitPlotScript(const std::string& csv_path);

/// Convenience wrappers: run, summarize, write CSV into plan-specific file
/// names under out_dir, and return the CSV path.
std::string runGapSweep(ExperimentPlan plan, const std::string& out_dir);
std::string runSizeSweep(ExperimentPlan plan, const std::string& out_dir);
std::string runFileSweep(ExperimentPlan plan, const std::string& out_dir);

}  // namespace certeig
