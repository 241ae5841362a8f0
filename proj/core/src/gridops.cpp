#include "gradlab/gridops.hpp"

#include <cmath>
#include <stdexcept>

#include "gradlab/common.hpp"

namespace gradlab {

SpatialStencil::SpatialStencil(const GridSpec& g) : grid(&g) {
  for (int a = 0; a < static_cast<int>(g.axes.size()); ++a) {
    if (!g.axes[a].collapsed) res.push_back(a);
  }
  stride.assign(res.size(), 1);
  count.resize(res.size());
  h.resize(res.size());
  for (int r = static_cast<int>(res.size()) - 1; r >= 0; --r) {
    const AxisSpec& ax = g.axes[res[r]];
    count[r] = ax.count;
    h[r] = ax.step();
    if (r + 1 < static_cast<int>(res.size())) stride[r] = stride[r + 1] * count[r + 1];
  }
}

int SpatialStencil::shift(int s, int r, int delta) const {
  int i = index_along(s, r);
  int j = i + delta;
  if (grid->axes[res[r]].periodic) {
    j = ((j % count[r]) + count[r]) % count[r];
  } else if (j < 0 || j >= count[r]) {
    throw std::out_of_range("stencil shift past a non-periodic end");
  }
  return s + (j - i) * stride[r];
}

bool SpatialStencil::interior(int s) const {
  for (int r = 0; r < static_cast<int>(res.size()); ++r) {
    if (grid->axes[res[r]].periodic) continue;
    int i = index_along(s, r);
    if (i == 0 || i == count[r] - 1) return false;
  }
  return true;
}

bool SpatialStencil::end_row(int s) const { return !interior(s); }

double SpatialStencil::d1(std::span<const double> slice, int s, int r) const {
  const AxisSpec& ax = grid->axes[res[r]];
  int i = index_along(s, r);
  if (!ax.periodic && (i == 0 || i == count[r] - 1)) return 0.0;  // even reflection
  return (slice[shift(s, r, +1)] - slice[shift(s, r, -1)]) / (2.0 * h[r]);
}

double SpatialStencil::d2(std::span<const double> slice, int s, int r) const {
  const AxisSpec& ax = grid->axes[res[r]];
  int i = index_along(s, r);
  double hh = h[r] * h[r];
  if (!ax.periodic && i == 0) {
    return 2.0 * (slice[shift(s, r, +1)] - slice[s]) / hh;
  }
  if (!ax.periodic && i == count[r] - 1) {
    return 2.0 * (slice[shift(s, r, -1)] - slice[s]) / hh;
  }
  return (slice[shift(s, r, +1)] - 2.0 * slice[s] + slice[shift(s, r, -1)]) / hh;
}

double SpatialStencil::cross(std::span<const double> slice, int s, int ra, int rb) const {
  if (ra == rb) return d2(slice, s, ra);
  int spp = shift(shift(s, ra, +1), rb, +1);
  int spm = shift(shift(s, ra, +1), rb, -1);
  int smp = shift(shift(s, ra, -1), rb, +1);
  int smm = shift(shift(s, ra, -1), rb, -1);
  return (slice[spp] - slice[spm] - slice[smp] + slice[smm]) / (4.0 * h[ra] * h[rb]);
}

double time_deriv(const GridSpec& grid, std::span<const double> values, int j, int s) {
  const double dt = grid.dt();
  const int ns = grid.spatial_size();
  auto at = [&](int row) { return values[static_cast<size_t>(row) * ns + s]; };
  if (j == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * dt);
  if (j == grid.nt - 1) return (3.0 * at(j) - 4.0 * at(j - 1) + at(j - 2)) / (2.0 * dt);
  return (at(j + 1) - at(j - 1)) / (2.0 * dt);
}

double pole_inverse_metric(const EvolvingModel& model, double t) {
  switch (model.kind) {
    case ModelKind::ShrinkingSphere:
      return 1.0 / model.sphere_factor(t);
    case ModelKind::StaticHyperbolic:
      return 1.0;
    default:
      throw DomainError("model has no pole rows");
  }
}

namespace {

// Identifies a resolved axis sitting at a non-periodic end; -1 on a node
// where every resolved axis has two honest neighbors.
int end_axis(const SpatialStencil& st, int s) {
  for (int r = 0; r < static_cast<int>(st.res.size()); ++r) {
    const AxisSpec& ax = st.grid->axes[st.res[r]];
    if (ax.periodic) continue;
    int i = st.index_along(s, r);
    if (i == 0 || i == st.count[r] - 1) return r;
  }
  return -1;
}

bool at_pole_end(const SpatialStencil& st, int s, int r) {
  const AxisSpec& ax = st.grid->axes[st.res[r]];
  int i = st.index_along(s, r);
  if (i == 0) return ax.lo_end == AxisEnd::Pole;
  if (i == st.count[r] - 1) return ax.hi_end == AxisEnd::Pole;
  return false;
}

}  // namespace

bool laplacian_scalar(const EvolvingModel& model, const SpatialStencil& st,
                      std::span<const double> slice, int s, double t, double& out) {
  const GridSpec& grid = *st.grid;
  int er = end_axis(st, s);
  if (er >= 0 && at_pole_end(st, s, er)) {
    // All radial directions degenerate into one at the tip; the n-fold
    // symmetric limit of the Laplace-Beltrami operator survives.
    out = model.n * pole_inverse_metric(model, t) * st.d2(slice, s, er);
    return true;
  }
  // Neumann walls fall through: the reflecting d1/d2 stencils already encode
  // the boundary condition and the chart is regular there.
  std::vector<double> x = grid.point(s);
  if (!model.in_chart(x)) return false;
  MetricData md = metric_data(model, x, t);
  std::vector<double> d1(model.n, 0.0);
  for (int r = 0; r < static_cast<int>(st.res.size()); ++r)
    d1[st.res[r]] = st.d1(slice, s, r);
  // diagonal metric: Lap u = sum_b g^{bb} (u_,bb - Gamma^c_{bb} u_,c)
  double lap = 0.0;
  for (int b = 0; b < model.n; ++b) {
    double u_bb = 0.0;
    for (int r = 0; r < static_cast<int>(st.res.size()); ++r)
      if (st.res[r] == b) u_bb = st.d2(slice, s, r);
    double corr = 0.0;
    for (int c = 0; c < model.n; ++c) corr += md.gamma(c, b, b) * d1[c];
    lap += md.ginv(b, b) * (u_bb - corr);
  }
  out = lap;
  return true;
}

bool grad_sq_scalar(const EvolvingModel& model, const SpatialStencil& st,
                    std::span<const double> slice, int s, double t, double& out) {
  const GridSpec& grid = *st.grid;
  int er = end_axis(st, s);
  if (er >= 0 && at_pole_end(st, s, er)) {
    out = 0.0;  // smooth even field: gradient vanishes at the tip
    return true;
  }
  std::vector<double> x = grid.point(s);
  if (!model.in_chart(x)) return false;
  MetricData md = metric_data(model, x, t);
  double g2 = 0.0;
  for (int r = 0; r < static_cast<int>(st.res.size()); ++r) {
    int a = st.res[r];
    double da = st.d1(slice, s, r);
    g2 += md.ginv(a, a) * da * da;
  }
  out = g2;
  return true;
}

}  // namespace gradlab
