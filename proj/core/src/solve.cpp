#include "gradlab/solve.hpp"

#include <algorithm>
#include <cmath>

#include "gradlab/gridops.hpp"
#include "gradlab/quadrature.hpp"

namespace gradlab {

namespace {

// integral of a(s)^-2 over [t0, t1]
double inv_sq_scale_integral(const EvolvingModel& model, double t0, double t1) {
  return integrate([&](double s) { return 1.0 / sq(model.scale.value(s)); }, t0, t1);
}

int zonal_degree(const EvolvingModel& model, std::span<const int> modes) {
  if (modes.size() != 1) throw ConfigError("sphere modes: expected a single zonal degree");
  const int l = modes[0];
  if (l < 1) throw ConfigError("zonal degree must be >= 1");
  if (l >= 2 && model.n != 2)
    throw ConfigError("zonal degree >= 2 is available on the 2-sphere only");
  return l;
}

}  // namespace

double mode_decay(const EvolvingModel& model, std::span<const int> modes, double t) {
  model.require_time(t);
  switch (model.kind) {
    case ModelKind::ConformalCircle:
    case ModelKind::ConformalTorus: {
      if (modes.empty()) throw ConfigError("torus modes: need one integer per resolved axis");
      double m2 = 0.0;
      for (int m : modes) m2 += sq(static_cast<double>(m));
      return 0.5 * m2 * inv_sq_scale_integral(model, 0.0, t);
    }
    case ModelKind::ShrinkingSphere: {
      const int l = zonal_degree(model, modes);
      const double ev = static_cast<double>(l) * (l + model.n - 1);
      return ev / (2.0 * (model.n - 1)) * std::log(model.c0 / model.sphere_factor(t));
    }
    case ModelKind::StaticHyperbolic:
      throw ConfigError("no separable eigenmode family on static_hyperbolic");
  }
  return 0.0;
}

double mode_shape(const EvolvingModel& model, std::span<const int> modes,
                  std::span<const double> x) {
  switch (model.kind) {
    case ModelKind::ConformalCircle:
    case ModelKind::ConformalTorus: {
      if (static_cast<int>(modes.size()) > model.n)
        throw ConfigError("more torus modes than axes");
      double p = 1.0;
      for (std::size_t i = 0; i < modes.size(); ++i) p *= std::cos(modes[i] * x[i]);
      return p;
    }
    case ModelKind::ShrinkingSphere: {
      const int l = zonal_degree(model, modes);
      const double c = std::cos(x[0]);
      return l == 1 ? c : std::legendre(static_cast<unsigned>(l), c);
    }
    case ModelKind::StaticHyperbolic:
      throw ConfigError("no separable eigenmode family on static_hyperbolic");
  }
  return 0.0;
}

ScalarField closed_form_solution(const EvolvingModel& model, const GridSpec& grid,
                                 std::span<const int> modes, double eps) {
  grid.validate();
  ScalarField field;
  field.model = model;
  field.grid = grid;
  field.values.assign(static_cast<std::size_t>(grid.size()), 1.0);
  field.meta.kind = "exact";
  field.meta.eps = eps;
  field.meta.modes.assign(modes.begin(), modes.end());
  field.meta.profile = eps == 0.0 ? "constant" : "eigenmode";
  if (eps == 0.0) return field;

  if (std::abs(eps) >= 1.0) throw ConfigError("eigenmode amplitude must keep u positive");

  const int ns = grid.spatial_size();
  std::vector<double> shape(ns);
  for (int s = 0; s < ns; ++s) shape[s] = mode_shape(model, modes, grid.point(s));

  for (int j = 0; j < grid.nt; ++j) {
    const double amp = eps * std::exp(-mode_decay(model, modes, grid.time(j)));
    for (int s = 0; s < ns; ++s) field.values[grid.node(j, s)] = 1.0 + amp * shape[s];
  }
  return field;
}

double mass_scale_factor(const EvolvingModel& model, double t) {
  model.require_time(t);
  const double idf = integrate([&](double s) { return model.dtg_factor(s); }, 0.0, t);
  return std::exp(0.5 * model.n * idf);
}

namespace {

// Line operator L = (1/2) Lap_{g_t} restricted to the resolved axis:
// L u = (1/2)(A u_xx + B u_x) with diagonal-metric coefficients.
struct LineCoeffs {
  std::vector<double> A, B;
};

LineCoeffs line_coeffs(const EvolvingModel& model, const GridSpec& grid, int ax,
                       double t) {
  const AxisSpec& axis = grid.axes[ax];
  LineCoeffs lc;
  lc.A.assign(axis.count, 0.0);
  lc.B.assign(axis.count, 0.0);
  std::vector<double> d, dd;
  for (int i = 0; i < axis.count; ++i) {
    const bool lo_pole = (i == 0 && axis.lo_end == AxisEnd::Pole);
    const bool hi_pole = (i == axis.count - 1 && axis.hi_end == AxisEnd::Pole);
    if (lo_pole || hi_pole) continue;  // regularized rows never read A/B
    std::vector<double> x(grid.axes.size());
    for (std::size_t a = 0; a < grid.axes.size(); ++a) x[a] = grid.axes[a].fixed;
    x[ax] = axis.coord(i);
    metric_diag(model, x, t, d, dd);
    const double dx = d[ax];
    double blog = -dd[static_cast<std::size_t>(ax) * model.n + ax] / dx;
    for (int b = 0; b < model.n; ++b) {
      if (b == ax) continue;
      blog += dd[static_cast<std::size_t>(b) * model.n + ax] / d[b];
    }
    lc.A[i] = 1.0 / dx;
    lc.B[i] = blog / (2.0 * dx);
  }
  return lc;
}

// Thomas algorithm; diagonals are overwritten.
void solve_tridiag(std::vector<double>& lo, std::vector<double>& di,
                   std::vector<double>& up, std::vector<double>& rhs) {
  const int n = static_cast<int>(di.size());
  for (int i = 1; i < n; ++i) {
    const double w = lo[i] / di[i - 1];
    di[i] -= w * up[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= di[n - 1];
  for (int i = n - 2; i >= 0; --i) rhs[i] = (rhs[i] - up[i] * rhs[i + 1]) / di[i];
}

// Cyclic tridiagonal via Sherman-Morrison with the standard rank-one split.
void solve_cyclic(std::vector<double> lo, std::vector<double> di, std::vector<double> up,
                  std::vector<double>& rhs) {
  const int n = static_cast<int>(di.size());
  const double corner_lo = lo[0];    // couples row 0 to row n-1
  const double corner_up = up[n - 1];  // couples row n-1 to row 0
  const double gamma = -di[0];
  std::vector<double> d2(di);
  d2[0] -= gamma;
  d2[n - 1] -= corner_lo * corner_up / gamma;
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = corner_up;
  std::vector<double> da(d2), db(d2), la(lo), lb(lo), ua(up), ub(up);
  la[0] = lb[0] = 0.0;
  ua[n - 1] = ub[n - 1] = 0.0;
  std::vector<double> z(u);
  solve_tridiag(la, da, ua, rhs);
  solve_tridiag(lb, db, ub, z);
  const double vy = rhs[0] + corner_lo / gamma * rhs[n - 1];
  const double vz = z[0] + corner_lo / gamma * z[n - 1];
  const double factor = vy / (1.0 + vz);
  for (int i = 0; i < n; ++i) rhs[i] -= factor * z[i];
}

}  // namespace

ScalarField solve_heat(const EvolvingModel& model, const GridSpec& grid,
                       const InitialProfile& init) {
  grid.validate();
  if (grid.resolved_count() != 1)
    throw ConfigError("solve_heat runs on grids with exactly one resolved axis");
  int ax = -1;
  for (std::size_t a = 0; a < grid.axes.size(); ++a)
    if (!grid.axes[a].collapsed) ax = static_cast<int>(a);
  const AxisSpec& axis = grid.axes[ax];
  const int N = axis.count;
  const double h = axis.step();
  const double dt = grid.dt();

  ScalarField field;
  field.model = model;
  field.grid = grid;
  field.values.assign(static_cast<std::size_t>(grid.size()), 0.0);
  field.meta.kind = "numeric";
  field.meta.profile = init.type;
  field.meta.modes = init.modes;
  field.meta.eps = init.eps;

  // initial row
  for (int s = 0; s < N; ++s) {
    const std::vector<double> x = grid.point(s);
    double u0 = 1.0;
    if (init.type == "constant") {
      u0 = 1.0;
    } else if (init.type == "cosine") {
      u0 = 1.0 + init.eps * mode_shape(model, init.modes, x);
    } else if (init.type == "gaussian") {
      u0 = 1.0 + init.eps * std::exp(-sq(x[ax]) / (2.0 * sq(init.width)));
    } else {
      throw ConfigError("unknown initial profile: " + init.type);
    }
    if (u0 <= 0.0) throw ConfigError("initial profile is not positive");
    field.values[grid.node(0, s)] = u0;
  }

  std::vector<double> lo(N), di(N), up(N), rhs(N), cur(N);
  for (int j = 0; j + 1 < grid.nt; ++j) {
    const double tm = 0.5 * (grid.time(j) + grid.time(j + 1));
    const LineCoeffs lc = line_coeffs(model, grid, ax, tm);
    // l/d/u hold the operator L; the theta scheme applies I -/+ (dt/2) L
    for (int i = 0; i < N; ++i) {
      const bool lo_pole = (i == 0 && axis.lo_end == AxisEnd::Pole);
      const bool hi_pole = (i == N - 1 && axis.hi_end == AxisEnd::Pole);
      const bool lo_wall = (i == 0 && axis.lo_end == AxisEnd::Neumann);
      const bool hi_wall = (i == N - 1 && axis.hi_end == AxisEnd::Neumann);
      if (lo_pole || hi_pole) {
        const double w = model.n * pole_inverse_metric(model, tm) / sq(h);
        lo[i] = hi_pole ? w : 0.0;
        up[i] = lo_pole ? w : 0.0;
        di[i] = -w;
      } else if (lo_wall || hi_wall) {
        const double w = lc.A[i] / sq(h);
        lo[i] = hi_wall ? w : 0.0;
        up[i] = lo_wall ? w : 0.0;
        di[i] = -w;
      } else {
        lo[i] = 0.5 * (lc.A[i] / sq(h) - lc.B[i] / (2.0 * h));
        up[i] = 0.5 * (lc.A[i] / sq(h) + lc.B[i] / (2.0 * h));
        di[i] = -lc.A[i] / sq(h);
      }
    }
    for (int i = 0; i < N; ++i) cur[i] = field.values[grid.node(j, i)];
    // rhs = (I + (dt/2) L) u^j
    for (int i = 0; i < N; ++i) {
      const int im = (i == 0) ? (axis.periodic ? N - 1 : 0) : i - 1;
      const int ip = (i == N - 1) ? (axis.periodic ? 0 : N - 1) : i + 1;
      rhs[i] = cur[i] + 0.5 * dt * (lo[i] * cur[im] + di[i] * cur[i] + up[i] * cur[ip]);
    }
    std::vector<double> slo(N), sdi(N), sup(N);
    for (int i = 0; i < N; ++i) {
      slo[i] = -0.5 * dt * lo[i];
      sup[i] = -0.5 * dt * up[i];
      sdi[i] = 1.0 - 0.5 * dt * di[i];
    }
    if (axis.periodic) {
      solve_cyclic(slo, sdi, sup, rhs);
    } else {
      solve_tridiag(slo, sdi, sup, rhs);
    }

    const auto [old_min, old_max] = std::minmax_element(cur.begin(), cur.end());
    double new_min = rhs[0], new_max = rhs[0];
    for (double v : rhs) {
      new_min = std::min(new_min, v);
      new_max = std::max(new_max, v);
    }
    if (new_min <= 0.0)
      throw SolveError("positivity lost at t = " + std::to_string(grid.time(j + 1)));
    const double tol = 1e-10 * std::max(1.0, std::abs(*old_max));
    if (new_max > *old_max + tol || new_min < *old_min - tol)
      ++field.max_principle_violations;
    for (int i = 0; i < N; ++i) field.values[grid.node(j + 1, i)] = rhs[i];
  }
  return field;
}

}  // namespace gradlab
