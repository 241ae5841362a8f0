#pragma once

#include "gradlab/grid.hpp"
#include "gradlab/models.hpp"

namespace gradlab {

// Slack allowances scale with the square of the coarsest resolved chart step;
// the per-model constant absorbs the curvature-dependent stencil prefactor.
// Pinned against the refinement studies in the convergence tests.
double tolerance_constant(ModelKind kind);

// Allowance for pointwise bound checks: C * h^2.
double check_tolerance(const EvolvingModel& model, const GridSpec& grid);

// Allowance for drift verdicts: C * (h^2 + dt^2); the time stencil enters on
// an equal footing there.
double drift_tolerance(const EvolvingModel& model, const GridSpec& grid);

}  // namespace gradlab
