#include "gradlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gradlab/gridops.hpp"

namespace gradlab {

namespace {

constexpr double kPi = std::numbers::pi;

// Sup of a smooth profile over [0, T]: dense scan (endpoints included
// exactly) plus a ternary pass around the best bracket.
double sup_profile(const std::function<double(double)>& f, double T) {
  const int samples = 4096;
  double best = f(0.0);
  int best_i = 0;
  for (int i = 1; i <= samples; ++i) {
    const double v = f(T * i / samples);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  double lo = T * std::max(0, best_i - 1) / samples;
  double hi = T * std::min(samples, best_i + 1) / samples;
  for (int it = 0; it < 80; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (f(m1) < f(m2)) lo = m1; else hi = m2;
  }
  return std::max(best, f(0.5 * (lo + hi)));
}

}  // namespace

KProfile KProfile::of(double v) {
  KProfile k;
  k.constant = true;
  k.value = v;
  std::ostringstream os;
  os << v;
  k.desc = os.str();
  return k;
}

double ricci_upper_bound(const EvolvingModel& model) {
  return std::max(
      0.0, sup_profile([&](double t) { return model.ricci_factor(t); }, model.horizon));
}

BoundSet extract_bounds(const EvolvingModel& model, const Region& region,
                        bool constant_k) {
  const double T = model.horizon;
  auto rf = [&](double t) { return model.ricci_factor(t); };
  auto df = [&](double t) { return model.dtg_factor(t); };

  BoundSet b;
  b.k1 = std::max(0.0, sup_profile([&](double t) { return -rf(t); }, T));
  b.k2 = std::max(0.0, sup_profile([&](double t) { return -df(t); }, T));
  b.k3 = std::max(0.0, sup_profile([&](double t) { return df(t); }, T));
  // dt g is a time function times g on every model, so grad(dt g) = 0.
  b.k4 = 0.0;
  b.region = region.describe();

  auto neg_rt = [&](double t) { return -(rf(t) + df(t)); };
  if (constant_k) {
    b.k = KProfile::of(std::max(0.0, sup_profile(neg_rt, T)));
  } else {
    b.k.constant = false;
    b.k.fn = [model](double t) {
      return std::max(0.0, -(model.ricci_factor(t) + model.dtg_factor(t)));
    };
    b.k.desc = "max(0, -(ricci_factor + dtg_factor))";
  }
  return b;
}

BoundCheck verify_bounds(const EvolvingModel& model, const BoundSet& bounds,
                         int samples) {
  BoundCheck chk;
  chk.worst_slack = std::numeric_limits<double>::infinity();
  auto note = [&](double slack, const std::string& what, double t) {
    if (slack < chk.worst_slack) {
      chk.worst_slack = slack;
      std::ostringstream os;
      os << what << " margin " << slack << " at t=" << t;
      chk.detail = os.str();
    }
  };
  for (int i = 0; i <= samples; ++i) {
    const double t = model.horizon * i / samples;
    const double rf = model.ricci_factor(t);
    const double df = model.dtg_factor(t);
    note(rf + bounds.k1, "ric_lower", t);
    note(df + bounds.k2, "dtg_lower", t);
    note(bounds.k3 - df, "dtg_upper", t);
    note(bounds.k4, "grad_dtg", t);
    note(rf + df + bounds.k(t), "rt_lower", t);
  }
  chk.ok = chk.worst_slack >= -1e-12;
  return chk;
}

double phi_value(const EvolvingModel& model, std::span<const double> x0, double rho,
                 std::span<const double> x, double t) {
  if (rho <= 0.0) throw ConfigError("cutoff radius must be positive");
  const double d = distance(model, x0, x, t);
  return std::cos(kPi * std::min(d, rho) / (2.0 * rho));
}

namespace {

double cap_value(double d, double rho) {
  const double r = d / rho;
  return r >= 1.0 ? 0.0 : 1.0 - r * r;
}

// Chart-step geodesic length near a node: mask widths count grid cells.
double local_cell_length(const EvolvingModel& model, const GridSpec& grid,
                         std::span<const double> x, double t) {
  double worst = 0.0;
  std::vector<double> d, dd;
  std::vector<double> xs(x.begin(), x.end());
  // clamp into the open chart so metric_diag stays finite near poles
  if (model.kind == ModelKind::ShrinkingSphere || model.kind == ModelKind::StaticHyperbolic) {
    const int lo_ang = model.kind == ModelKind::StaticHyperbolic ? 1 : 0;
    if (model.kind == ModelKind::StaticHyperbolic)
      xs[0] = std::max(xs[0], 1e-3);
    for (int i = lo_ang; i + 1 < model.n; ++i)
      xs[i] = std::clamp(xs[i], 1e-3, kPi - 1e-3);
  }
  metric_diag(model, xs, t, d, dd);
  for (std::size_t a = 0; a < grid.axes.size(); ++a) {
    if (grid.axes[a].collapsed) continue;
    worst = std::max(worst, grid.axes[a].step() * std::sqrt(d[a]));
  }
  return worst;
}

// True near the chart's distance degeneracies seen from x0: wrapped-seam
// antipodes on flat models, the antipodal point on the sphere.  The
// hyperbolic radial chart has none (cutoffs are centered at the origin).
bool near_cut_locus(const EvolvingModel& model, std::span<const double> x0,
                    std::span<const double> x, double slack_chart) {
  switch (model.kind) {
    case ModelKind::ConformalCircle:
    case ModelKind::ConformalTorus: {
      for (int i = 0; i < model.n; ++i) {
        double w = std::fmod(std::abs(x[i] - x0[i]), 2.0 * kPi);
        if (w > kPi) w = 2.0 * kPi - w;
        if (w > kPi - slack_chart) return true;
      }
      return false;
    }
    case ModelKind::ShrinkingSphere: {
      // unit-sphere angle close to pi
      const double ang = distance(model, x0, x, 0.0) / std::sqrt(model.c0);
      return ang > kPi - slack_chart;
    }
    case ModelKind::StaticHyperbolic:
      return false;
  }
  return false;
}

}  // namespace

CutoffProfile build_cutoff(const EvolvingModel& model, const GridSpec& grid,
                           std::vector<double> center, double rho, CutoffShape shape,
                           int mask_cells) {
  if (rho <= 0.0) throw ConfigError("cutoff radius must be positive");
  grid.validate();
  CutoffProfile p;
  p.model = model;
  p.grid = grid;
  p.center = std::move(center);
  p.radius = rho;
  p.shape = shape;
  p.mask_cells = mask_cells;
  const int ns = grid.spatial_size();
  const std::size_t total = static_cast<std::size_t>(grid.size());
  p.phi.assign(total, 0.0);
  p.grad_phi_sq.assign(total, 0.0);
  p.heat_op.assign(total, 0.0);
  p.valid.assign(total, 0);
  p.in_ball.assign(total, 0);

  SpatialStencil st(grid);
  std::vector<double> dist(ns), dtphi(ns);
  for (int j = 0; j < grid.nt; ++j) {
    const double t = grid.time(j);
    for (int s = 0; s < ns; ++s) {
      const std::vector<double> x = grid.point(s);
      const double d = distance(model, p.center, x, t);
      dist[s] = d;
      const int node = grid.node(j, s);
      if (shape == CutoffShape::Cosine) {
        p.phi[node] = std::cos(kPi * std::min(d, rho) / (2.0 * rho));
        dtphi[s] = d < rho ? -std::sin(kPi * d / (2.0 * rho)) * kPi / (2.0 * rho) *
                                 dt_distance(model, p.center, x, t)
                           : 0.0;
      } else {
        p.phi[node] = cap_value(d, rho);
        dtphi[s] = d < rho
                       ? -2.0 * d / sq(rho) * dt_distance(model, p.center, x, t)
                       : 0.0;
      }
      p.in_ball[node] = d < rho ? 1 : 0;
    }
    std::span<const double> slice(p.phi.data() + static_cast<std::size_t>(j) * ns, ns);
    for (int s = 0; s < ns; ++s) {
      const int node = grid.node(j, s);
      const std::vector<double> x = grid.point(s);
      double lap = 0.0, g2 = 0.0;
      const bool ok_l = laplacian_scalar(model, st, slice, s, t, lap);
      const bool ok_g = grad_sq_scalar(model, st, slice, s, t, g2);
      if (!ok_l || !ok_g) continue;
      p.grad_phi_sq[node] = g2;
      p.heat_op[node] = lap - 2.0 * dtphi[s];
      if (!model.in_chart(x) || model.in_band(x)) continue;
      if (!st.interior(s)) continue;
      const double cell = local_cell_length(model, grid, x, t);
      if (std::abs(dist[s] - rho) <= mask_cells * cell) continue;  // support kink
      const double hmax_chart = [&] {
        double hc = 0.0;
        for (const auto& ax : grid.axes)
          if (!ax.collapsed) hc = std::max(hc, ax.step());
        return hc;
      }();
      if (near_cut_locus(model, p.center, x, mask_cells * hmax_chart)) continue;
      p.valid[node] = 1;
    }
  }
  return p;
}

GradPhiReport grad_phi_bound_check(const CutoffProfile& profile) {
  GradPhiReport rep;
  rep.analytic_bound = kPi / (2.0 * profile.radius);
  for (std::size_t i = 0; i < profile.phi.size(); ++i) {
    if (!profile.valid[i]) continue;
    rep.numeric_sup = std::max(rep.numeric_sup, std::sqrt(profile.grad_phi_sq[i]));
    ++rep.checked;
  }
  return rep;
}

PhiFloorReport phi_floor_check(const CutoffProfile& profile) {
  PhiFloorReport rep;
  rep.floor = 1.0 - kPi / 4.0;
  const GridSpec& grid = profile.grid;
  const int ns = grid.spatial_size();
  for (int j = 0; j < grid.nt; ++j) {
    const double t = grid.time(j);
    for (int s = 0; s < ns; ++s) {
      const std::vector<double> x = grid.point(s);
      const double d = distance(profile.model, profile.center, x, t);
      if (d > profile.radius / 2.0) continue;
      const double v = profile.phi[grid.node(j, s)];
      rep.min_phi = std::min(rep.min_phi, v);
      if (v < rep.floor) ++rep.violations;
      ++rep.checked;
    }
  }
  return rep;
}

double c_phi_coefficient(CPhiVariant variant, int n, double alpha) {
  switch (variant) {
    case CPhiVariant::Hamilton3: return 3.0;
    case CPhiVariant::Hamilton7: return 7.0;
    case CPhiVariant::LiYauAlpha:
      if (alpha <= 1.0) throw ConfigError("cutoff constant variant requires alpha > 1");
      return 3.0 + sq(alpha) / (alpha - 1.0) * n;
  }
  return 3.0;
}

CPhiReport c_phi(const CutoffProfile& profile, CPhiVariant variant,
                 const BoundSet& bounds, double alpha) {
  CPhiReport rep;
  const int n = profile.model.n;
  rep.coefficient = c_phi_coefficient(variant, n, alpha);
  rep.numeric_sup = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < profile.phi.size(); ++i) {
    if (!profile.valid[i]) continue;
    const double v =
        rep.coefficient * profile.grad_phi_sq[i] - profile.phi[i] * profile.heat_op[i];
    rep.numeric_sup = std::max(rep.numeric_sup, v);
    ++rep.checked;
  }
  if (rep.checked == 0) throw DomainError("cutoff constant: empty valid set");
  rep.analytic_bound = sq(kPi) * (n + rep.coefficient) / (4.0 * sq(profile.radius)) +
                       kPi / 2.0 * (bounds.k1 + bounds.k2);
  return rep;
}

}  // namespace gradlab
