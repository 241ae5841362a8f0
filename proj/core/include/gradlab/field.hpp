#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gradlab/grid.hpp"
#include "gradlab/models.hpp"

namespace gradlab {

// Solution metadata carried into reports.
struct SolutionMeta {
  std::string kind = "exact";       // "exact" | "numeric"
  std::string profile;              // mode descriptor or initial-profile descriptor
  std::vector<int> modes;
  double eps = 0.0;
};

// Positive scalar u sampled on a space-time grid.
struct ScalarField {
  EvolvingModel model;
  GridSpec grid;
  std::vector<double> values;  // [time][spatial] row-major
  SolutionMeta meta;
  long max_principle_violations = 0;  // numeric solves only

  double at(int j, int s) const { return values[grid.node(j, s)]; }
  double& at(int j, int s) { return values[grid.node(j, s)]; }
};

struct Region {
  enum class Kind { Global, Ball, TimeSlice };
  Kind kind = Kind::Global;
  std::vector<double> center;  // Ball
  double radius = 0.0;         // Ball (closed: rho_t <= radius)
  double t_slice = 0.0;        // TimeSlice

  static Region global() { return {}; }
  static Region ball(std::vector<double> center, double radius) {
    Region r;
    r.kind = Kind::Ball;
    r.center = std::move(center);
    r.radius = radius;
    return r;
  }
  static Region time_slice(double t) {
    Region r;
    r.kind = Kind::TimeSlice;
    r.t_slice = t;
    return r;
  }
  std::string describe() const;
};

bool region_contains(const EvolvingModel& model, const Region& region,
                     std::span<const double> x, double t, double dt_half);

// Grid sup of |values| is not what we want here: sup_norm is the max of the
// field itself (positive solutions).  Throws DomainError on an empty selection.
double sup_norm(const ScalarField& field, const Region& region);

// \int u dvol on a time slice (trapezoid along non-periodic axes).
double volume_integral(const ScalarField& field, int j);

// Multilinear interpolation in (resolved axes) x time.  Periodic axes wrap;
// non-periodic coordinates are clamped to the grid range.
double interpolate(const GridSpec& grid, std::span<const double> values,
                   std::span<const double> x, double t);

}  // namespace gradlab
