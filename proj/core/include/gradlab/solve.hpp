#pragma once

#include <span>
#include <string>
#include <vector>

#include "gradlab/field.hpp"
#include "gradlab/grid.hpp"
#include "gradlab/models.hpp"

namespace gradlab {

// Initial data u0 > 0 for the numeric solver.
//   constant: u0 = 1
//   cosine:   u0 = 1 + eps * (separable mode shape, modes per resolved axis)
//   gaussian: u0 = 1 + eps * exp(-x^2 / (2 width^2)) along the line coordinate
struct InitialProfile {
  std::string type = "cosine";
  double eps = 0.3;
  std::vector<int> modes = {1};
  double width = 0.5;
};

// Decay exponent lambda(t) of the separable eigenmode solution
// u = 1 + eps * exp(-lambda(t)) * shape(x); lambda(0) = 0.
double mode_decay(const EvolvingModel& model, std::span<const int> modes, double t);

// Spatial mode shape at a chart point (product of cosines; zonal polynomial
// on the sphere).  Degree >= 2 zonal modes exist on the 2-sphere only.
double mode_shape(const EvolvingModel& model, std::span<const int> modes,
                  std::span<const double> x);

// Separable eigenmode solution of dt u = (1/2) Lap_{g_t} u sampled on the
// grid.  eps = 0 yields the constant solution on any model; otherwise the
// model must carry the requested mode family.
ScalarField closed_form_solution(const EvolvingModel& model, const GridSpec& grid,
                                 std::span<const int> modes, double eps);

// Crank-Nicolson line solver for dt u = (1/2) Lap_{g_t} u on a grid with
// exactly one resolved axis; coefficients frozen at the step midpoint, so the
// scheme is second order in both the step and the mesh.  Throws SolveError if
// positivity is lost.
ScalarField solve_heat(const EvolvingModel& model, const GridSpec& grid,
                       const InitialProfile& init);

// Expected mass ratio (integral of u dvol_t) / (integral of u0 dvol_0) for
// any solution; the volume element feeds the only drift.
double mass_scale_factor(const EvolvingModel& model, double t);

}  // namespace gradlab
