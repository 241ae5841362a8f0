#pragma once

#include <span>
#include <string>
#include <vector>

#include "gradlab/models.hpp"

namespace gradlab {

// End handling for a non-periodic resolved axis.  "pole" marks a coordinate
// degeneracy where smooth fields are even (zonal colatitude, radial origin);
// "neumann" is a reflecting wall.
enum class AxisEnd { Periodic, Pole, Neumann };

struct AxisSpec {
  std::string name;
  int count = 0;        // resolved sample count (>= 8), 1 if collapsed
  double lo = 0.0;
  double hi = 0.0;
  bool periodic = false;
  bool collapsed = false;
  double fixed = 0.0;   // coordinate value used when collapsed
  AxisEnd lo_end = AxisEnd::Periodic;
  AxisEnd hi_end = AxisEnd::Periodic;

  double step() const;
  double coord(int i) const;
};

// Uniform space-time product grid over the model chart and [0, t1].
struct GridSpec {
  std::vector<AxisSpec> axes;
  int nt = 0;
  double t1 = 0.0;
  double t_lo = -1.0;  // mask floor; < 0 means "use 4 * dt"

  int spatial_size() const;
  int size() const { return spatial_size() * nt; }
  double dt() const { return t1 / (nt - 1); }
  // endpoint pinned exactly so window checks never see t1 + ulp
  double time(int j) const { return j == nt - 1 ? t1 : t1 * j / (nt - 1); }
  double mask_floor() const { return t_lo >= 0.0 ? t_lo : 4.0 * dt(); }
  int resolved_count() const;

  // flat spatial index <-> per-axis indices (row-major over resolved axes)
  std::vector<int> unflatten(int s) const;
  int flatten(std::span<const int> idx) const;
  std::vector<double> point(int s) const;  // full chart coordinates
  int node(int j, int s) const { return j * spatial_size() + s; }

  void validate() const;  // resolution and step invariants
};

// Chart grids per model.  nx applies to each resolved axis.
// sphere: zonal colatitude line including pole rows (phi collapsed);
// torus: all axes resolved and periodic; circle: one periodic axis;
// hyperbolic: radial line with pole row at r = 0 and a Neumann outer wall.
GridSpec default_grid(const EvolvingModel& model, int nx, int nt, double t_lo = -1.0);

// Torus grid with only the first axis resolved (profile fields).
GridSpec torus_line_grid(const EvolvingModel& model, int nx, int nt, double t_lo = -1.0);

GridSpec refined(const GridSpec& grid, int levels);

}  // namespace gradlab
