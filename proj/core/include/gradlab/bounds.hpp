#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gradlab/field.hpp"
#include "gradlab/grid.hpp"
#include "gradlab/models.hpp"

namespace gradlab {

// Lower-bound profile k(t) certifying R_t >= -k(t) g in the eigenvalue sense.
struct KProfile {
  bool constant = true;
  double value = 0.0;
  std::function<double(double)> fn;
  std::string desc = "0";

  double operator()(double t) const { return constant ? value : fn(t); }
  static KProfile of(double v);
};

// Curvature constants valid on a region:
//   Ric >= -k1 g,  -k2 g <= dt g <= k3 g,  |grad(dt g)| <= k4,  R_t >= -k(t) g
// all eigenvalue bounds relative to g_t.
struct BoundSet {
  KProfile k;
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;
  std::string region = "global";
};

// Tightest constants for the model over [0, horizon]; analytic factor
// profiles sampled densely, extrema refined at the endpoints they attain.
// constant_k folds the k(t) profile into its sup (keeps h(t) closed-form).
BoundSet extract_bounds(const EvolvingModel& model, const Region& region,
                        bool constant_k = true);

// sup over the window of the Ricci eigenvalue factor, clamped at zero;
// attained at the horizon on the shrinking sphere.
double ricci_upper_bound(const EvolvingModel& model);

struct BoundCheck {
  bool ok = true;
  double worst_slack = 0.0;  // most negative margin across all invariants
  std::string detail;
};

// Re-verifies every BoundSet invariant by dense time sampling.
BoundCheck verify_bounds(const EvolvingModel& model, const BoundSet& bounds,
                         int samples = 2048);

// Localization value cos(pi * min(rho_t(x0,x), rho) / (2 rho)).
double phi_value(const EvolvingModel& model, std::span<const double> x0, double rho,
                 std::span<const double> x, double t);

enum class CutoffShape { Cosine, Cap };

// Cutoff sampled on a grid with its stencil derivatives.  heat_op holds
// (Lap - 2 dt) phi with the time term analytic (distance motion is closed
// form).  Nodes within mask_cells of the support kink or of a distance
// degeneracy are dropped from valid, matching the convention that the
// non-differentiable set carries no weight.
struct CutoffProfile {
  EvolvingModel model;
  GridSpec grid;
  std::vector<double> center;
  double radius = 1.0;
  CutoffShape shape = CutoffShape::Cosine;
  int mask_cells = 3;
  std::vector<double> phi;          // grid-sized
  std::vector<double> grad_phi_sq;  // grid-sized
  std::vector<double> heat_op;      // grid-sized
  std::vector<char> valid;
  std::vector<char> in_ball;  // rho_t(x0, x) < radius

  double at(int j, int s) const { return phi[grid.node(j, s)]; }
};

CutoffProfile build_cutoff(const EvolvingModel& model, const GridSpec& grid,
                           std::vector<double> center, double rho,
                           CutoffShape shape = CutoffShape::Cosine, int mask_cells = 3);

struct GradPhiReport {
  double numeric_sup = 0.0;
  double analytic_bound = 0.0;  // pi / (2 rho)
  long checked = 0;
};

GradPhiReport grad_phi_bound_check(const CutoffProfile& profile);

// Half-ball floor phi >= 1 - pi/4 on B_{rho/2, T}: returns the min of phi
// over the half ball and the violation count against the floor.
struct PhiFloorReport {
  double min_phi = 1.0;
  double floor = 0.0;
  long violations = 0;
  long checked = 0;
};

PhiFloorReport phi_floor_check(const CutoffProfile& profile);

// Coefficient variant in sup { c |grad phi|^2 - phi (Lap - 2 dt) phi }.
enum class CPhiVariant { Hamilton3, Hamilton7, LiYauAlpha };

double c_phi_coefficient(CPhiVariant variant, int n, double alpha);

struct CPhiReport {
  double numeric_sup = 0.0;
  double analytic_bound = 0.0;  // pi^2 (n + c) / (4 rho^2) + (pi/2)(k1 + k2)
  double coefficient = 0.0;
  long checked = 0;
};

// Grid sup of the cutoff constant; the analytic bound applies to the Cosine
// shape (comparison-theorem route), other shapes report the numeric sup only.
CPhiReport c_phi(const CutoffProfile& profile, CPhiVariant variant,
                 const BoundSet& bounds, double alpha = 2.0);

}  // namespace gradlab
