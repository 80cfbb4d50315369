#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "certeig/bench.hpp"

namespace {

std::vector<certeig::Method> parseMethods(const std::vector<std::string>& names) {
  std::vector<certeig::Method> out;
  for (const auto& n : names) {
    if (n == "lobpcg-precond")
      out.push_back(certeig::Method::LobpcgPrecond);
    else if (n == "lobpcg-plain")
      out.push_back(certeig::Method::LobpcgPlain);
    else if (n == "lanczos-shifted")
      out.push_back(certeig::Method::LanczosShifted);
    else
      throw CLI::ValidationError("--methods", "unknown method '" + n + "'");
  }
  return out;
}

int workersFromEnv() {
  const char* env = std::getenv("CERTEIG_WORKERS");
  if (!env) return 1;
  int w = std::atoi(env);
  return w > 0 ? w : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certeig: fast positive-semidefiniteness verification benchmarks"};
  app.require_subcommand(1);

  certeig::ExperimentPlan plan;
  plan.workers = workersFromEnv();
  std::string out_dir = ".";
  std::vector<std::string> method_names{"lobpcg-precond", "lobpcg-plain", "lanczos-shifted"};
  bool full_scale = false;
  bool emit_plot = true;

  auto addCommonFlags = [&](CLI::App* cmd) {
    cmd->add_option("--trials", plan.trials, "trials per grid point");
    cmd->add_option("--methods", method_names, "methods to run")->delimiter(',');
    cmd->add_option("--tol", plan.tol, "eigensolver relative tolerance tau");
    cmd->add_option("--eta", plan.eta, "regularization (<=0: scaled default per matrix)");
    cmd->add_option("--blocksize", plan.blocksize, "LOBPCG block size m");
    cmd->add_option("--fill-limit", plan.ildl_opts.fill_limit,
                    "incomplete-factorization fill per column (-1: auto)");
    cmd->add_option("--drop-tol", plan.ildl_opts.drop_tol, "incomplete-factorization drop tolerance");
    cmd->add_option("--seed", plan.master_seed, "master seed");
    cmd->add_option("--out-dir", out_dir, "output directory");
    cmd->add_flag("--full-scale", full_scale, "use the full-scale parameter grids");
    cmd->add_flag("!--no-plot", emit_plot, "skip plot script emission");
  };

  auto* gap = app.add_subcommand("gap-sweep", "vary the eigenvalue gap at fixed N");
  gap->add_option("--gamma-list", plan.gamma_grid, "gap values")->delimiter(',');
  gap->add_option("--size", plan.N, "problem size N");
  addCommonFlags(gap);

  auto* size = app.add_subcommand("size-sweep", "vary the problem size at fixed gap");
  size->add_option("--size-list", plan.size_grid, "N values")->delimiter(',');
  size->add_option("--gamma", plan.gamma, "eigenvalue gap");
  addCommonFlags(size);

  auto* file = app.add_subcommand("verify-file", "verify Matrix Market certificate matrices");
  file->add_option("paths", plan.files, "Matrix Market files")->required();
  addCommonFlags(file);

  std::string plot_csv;
  auto* plot = app.add_subcommand("plot", "emit a plot script for an existing sweep CSV");
  plot->add_option("csv", plot_csv, "sweep CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    plan.methods = parseMethods(method_names);
    std::string csv;
    if (gap->parsed()) {
      if (full_scale && gap->count("--gamma-list") == 0) {
        plan.gamma_grid = {1e1, 1e0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
        if (gap->count("--size") == 0) plan.N = 25000;
      }
      csv = certeig::runGapSweep(plan, out_dir);
    } else if (size->parsed()) {
      if (full_scale && size->count("--size-list") == 0) {
        plan.size_grid.clear();
        for (int k = 1; k <= 10; ++k) plan.size_grid.push_back(5000 * k);
      }
      csv = certeig::runSizeSweep(plan, out_dir);
    } else if (file->parsed()) {
      if (file->count("--trials") == 0) plan.trials = 1;
      csv = certeig::runFileSweep(plan, out_dir);
    } else if (plot->parsed()) {
      std::cout << certeig::emitPlotScript(plot_csv) << "\n";
      return 0;
    }
    std::cout << csv << "\n";
    if (emit_plot) std::cout << certeig::emitPlotScript(csv) << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
