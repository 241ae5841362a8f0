#pragma once

#include <string>
#include <vector>

#include "gradlab/config.hpp"
#include "gradlab/field.hpp"
#include "gradlab/inequality.hpp"
#include "gradlab/montecarlo.hpp"
#include "gradlab/report.hpp"

namespace gradlab {

// Outcome of a full run.  The JSON report is self-contained; the raw per-node
// reports ride along so the CSV extracts need no recomputation.
struct LabResult {
  ordered_json report;
  bool pass = true;
  std::vector<std::string> failures;
  std::vector<InequalityReport> checks;
  std::vector<DriftReport> drifts;
  std::vector<SupermartingaleReport> mc_stats;
};

// Grid and solution builders shared with the CLI subcommands.
GridSpec build_grid(const RunConfig& cfg);
ScalarField build_solution(const RunConfig& cfg, const GridSpec& grid);

// Runs every configured block in a fixed order.  Throws ConfigError for an
// invalid model or request; computational failures land in `failures`.
LabResult run_lab(const RunConfig& cfg);

// Writes report.json and the CSV extracts under cfg.output.dir, honoring the
// configured format switches.
void write_outputs(const RunConfig& cfg, const LabResult& result);

}  // namespace gradlab
