#pragma once

#include <span>
#include <vector>

#include "gradlab/grid.hpp"
#include "gradlab/models.hpp"

namespace gradlab {

// Second-order finite differences on a GridSpec.  Periodic axes wrap; at a
// Pole end smooth fields are even (first derivative 0, ghost-reflected second
// derivative); a Neumann end reflects the same way by construction.
struct SpatialStencil {
  const GridSpec* grid;
  std::vector<int> res;     // resolved axis ids, in axis order
  std::vector<int> stride;  // flat stride per resolved axis
  std::vector<int> count;
  std::vector<double> h;

  explicit SpatialStencil(const GridSpec& g);

  int index_along(int s, int r) const { return (s / stride[r]) % count[r]; }
  int shift(int s, int r, int delta) const;  // neighbor flat index (periodic wrap)

  // all resolved axes stencil-clean: periodic, or index in [1, count-2]
  bool interior(int s) const;
  // end row of some non-periodic axis (pole or neumann)
  bool end_row(int s) const;

  double d1(std::span<const double> slice, int s, int r) const;
  double d2(std::span<const double> slice, int s, int r) const;
  double cross(std::span<const double> slice, int s, int ra, int rb) const;
};

// d/dt of a space-time array at row j; one-sided second order at both ends.
double time_deriv(const GridSpec& grid, std::span<const double> values, int j, int s);

// Inverse metric factor g^{aa} for the first resolved axis at a pole row,
// where the full metric package is degenerate.
double pole_inverse_metric(const EvolvingModel& model, double t);

// Laplace-Beltrami of a sampled slice at node s.  Returns false where no
// second-order formula applies.  Valid on interior nodes and on pole/neumann
// rows (regularized: Lap -> n * g^xx * u_xx at a pole).
bool laplacian_scalar(const EvolvingModel& model, const SpatialStencil& st,
                      std::span<const double> slice, int s, double t, double& out);

// |grad u|^2 = g^{ab} du_a du_b on the same validity set as laplacian_scalar
// (zero gradient at pole rows by symmetry).
bool grad_sq_scalar(const EvolvingModel& model, const SpatialStencil& st,
                    std::span<const double> slice, int s, double t, double& out);

}  // namespace gradlab
