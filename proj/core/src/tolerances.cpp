#include "gradlab/tolerances.hpp"

#include "gradlab/calculus.hpp"
#include "gradlab/common.hpp"

namespace gradlab {

double tolerance_constant(ModelKind kind) {
  switch (kind) {
    case ModelKind::ConformalCircle:
      return 10.0;
    case ModelKind::ConformalTorus:
      return 25.0;
    case ModelKind::ShrinkingSphere:
      return 50.0;
    case ModelKind::StaticHyperbolic:
      return 60.0;
  }
  throw ConfigError("unknown model kind");
}

double check_tolerance(const EvolvingModel& model, const GridSpec& grid) {
  const double h = mesh_h(grid);
  return tolerance_constant(model.kind) * h * h;
}

double drift_tolerance(const EvolvingModel& model, const GridSpec& grid) {
  const double h = mesh_h(grid);
  const double dt = grid.dt();
  return tolerance_constant(model.kind) * (h * h + dt * dt);
}

}  // namespace gradlab
