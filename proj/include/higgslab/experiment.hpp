#pragma once

#include <string>
#include <vector>

#include "higgslab/config.hpp"
#include "higgslab/report.hpp"

namespace higgslab {

enum ExitCode { kExitOk = 0, kExitInvalidConfig = 2, kExitSolverFailure = 3, kExitInvariantViolation = 4 };

struct CheckResult {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool passed = true;
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::string message;  // first failing invariant, or the error text
  Json summary;
  std::vector<CheckResult> checks;
};

// mesh | solve | family | holonomy | limit | beltrami | reality | sweep | report.
// Writes artifacts into cfg.output_dir and summary.json there.
RunOutcome run_command(const std::string& command, const RunConfig& cfg);

struct SweepRow {
  Parameters params;
  bool ok = true;
  std::string error;
  double sup_mu = 0.0;
  double relation_defect = 0.0;
  double reality_residual = 0.0;
  double curvature_residual = 0.0;
  Complex invariant;  // hbar^2 R^2 (ZeroDegree) or hbar^2 R^4 (Hitchin)
};

// One row per grid point in grid order; points run concurrently.
std::vector<SweepRow> run_sweep(const RunConfig& cfg);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

// gnuplot script over the emitted CSV files.
void write_plot_script(std::ostream& out, bool with_convergence);

}  // namespace higgslab
