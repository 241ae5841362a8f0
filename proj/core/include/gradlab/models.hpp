#pragma once

#include <span>
#include <string>
#include <vector>

#include "gradlab/common.hpp"

namespace gradlab {

enum class ModelKind { ShrinkingSphere, ConformalCircle, ConformalTorus, StaticHyperbolic };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

// Time profile a(t) = base + amp * sin(omega * t); amp = 0 is a static scale.
struct ScaleProfile {
  double base = 1.0;
  double amp = 0.0;
  double omega = 1.0;
  double value(double t) const;
  double rate(double t) const;  // da/dt
};

// A closed-form family (M^n, g_t), t in [0, horizon].  Every member has a
// diagonal chart metric and satisfies Ric = ricci_factor(t) * g and
// dt g = dtg_factor(t) * g, which keeps curvature bounds exact.
struct EvolvingModel {
  ModelKind kind = ModelKind::ConformalCircle;
  int n = 1;                  // manifold dimension
  double horizon = 1.0;       // window [0, horizon]
  double c0 = 1.0;            // sphere: g_t = c(t) * g_unit with c(t) = c0 - (n-1) t
  ScaleProfile scale;         // circle/torus: g_t = a(t)^2 * flat
  double kappa = 1.0;         // hyperbolic curvature magnitude (sectional = -kappa)
  double chart_radius = 2.0;  // hyperbolic chart extent in the radial coordinate
  double band = 0.05;         // degenerate-node exclusion half-width (mask, not validity)

  static EvolvingModel shrinking_sphere(int n, double c0, double T, double band = 0.05);
  static EvolvingModel conformal_circle(ScaleProfile a, double T);
  static EvolvingModel conformal_torus(int n, ScaleProfile a, double T);
  static EvolvingModel static_hyperbolic(int n, double kappa, double R, double T,
                                         double band = 0.05);

  double sphere_factor(double t) const;  // c(t), sphere only
  double ricci_factor(double t) const;   // Ric = rf * g
  double dtg_factor(double t) const;     // dt g = df * g
  double rt_factor(double t) const { return ricci_factor(t) + dtg_factor(t); }

  void require_time(double t) const;           // throws DomainError outside the window
  void require_chart(std::span<const double> x) const;
  bool in_chart(std::span<const double> x) const;
  bool in_band(std::span<const double> x) const;  // true => node is masked out of checks

  std::string describe() const;
};

// Pointwise metric package in chart coordinates.  Matrices are row-major n*n;
// christoffel is Gamma^k_{ij} flattened as k*n*n + i*n + j.
struct MetricData {
  int n = 0;
  std::vector<double> g;
  std::vector<double> g_inv;
  double sqrt_det = 0.0;
  std::vector<double> christoffel;
  std::vector<double> ricci;
  std::vector<double> dt_g;
  double grad_dt_g_norm = 0.0;

  double gamma(int k, int i, int j) const { return christoffel[(k * n + i) * n + j]; }
  double ginv(int i, int j) const { return g_inv[i * n + j]; }
};

MetricData metric_data(const EvolvingModel& model, std::span<const double> x, double t);

// Ric + dt g in chart components; identically zero on the shrinking sphere.
std::vector<double> r_tensor(const EvolvingModel& model, std::span<const double> x, double t);

// Geodesic distance under g_t (closed form per model).
double distance(const EvolvingModel& model, std::span<const double> x0,
                std::span<const double> x, double t);

// d/dt of distance at fixed endpoints (metric motion only).
double dt_distance(const EvolvingModel& model, std::span<const double> x0,
                   std::span<const double> x, double t);

struct ValidityReport {
  bool valid = true;
  double first_violation_time = -1.0;
  std::string detail;
};

// Checks metric positivity over the whole window (sphere collapse, scale sign).
ValidityReport model_validity(const EvolvingModel& model);

// Diagonal metric entries d_a and their spatial partials dd[a*n + j] = d(d_a)/dx_j.
void metric_diag(const EvolvingModel& model, std::span<const double> x, double t,
                 std::vector<double>& d, std::vector<double>& dd);

// S^n chart angles -> unit vector in R^{n+1}.  cos(theta_1) lands in the
// first slot; the azimuth spans the last two.  sphere_angles inverts the map,
// clamping rounding overshoot and wrapping the azimuth into [0, 2 pi).
std::vector<double> sphere_embed(std::span<const double> angles);
std::vector<double> sphere_angles(std::span<const double> p);

}  // namespace gradlab
