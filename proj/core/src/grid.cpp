#include "gradlab/grid.hpp"

#include <cmath>
#include <numbers>

namespace gradlab {

namespace {
constexpr double kPi = std::numbers::pi;
}

double AxisSpec::step() const {
  if (collapsed) return 0.0;
  return periodic ? (hi - lo) / count : (hi - lo) / (count - 1);
}

double AxisSpec::coord(int i) const {
  if (collapsed) return fixed;
  return lo + step() * i;
}

int GridSpec::spatial_size() const {
  int s = 1;
  for (const auto& ax : axes)
    if (!ax.collapsed) s *= ax.count;
  return s;
}

int GridSpec::resolved_count() const {
  int c = 0;
  for (const auto& ax : axes)
    if (!ax.collapsed) ++c;
  return c;
}

std::vector<int> GridSpec::unflatten(int s) const {
  std::vector<int> idx(axes.size(), 0);
  for (int a = static_cast<int>(axes.size()) - 1; a >= 0; --a) {
    if (axes[a].collapsed) continue;
    idx[a] = s % axes[a].count;
    s /= axes[a].count;
  }
  return idx;
}

int GridSpec::flatten(std::span<const int> idx) const {
  int s = 0;
  for (std::size_t a = 0; a < axes.size(); ++a) {
    if (axes[a].collapsed) continue;
    s = s * axes[a].count + idx[a];
  }
  return s;
}

std::vector<double> GridSpec::point(int s) const {
  const auto idx = unflatten(s);
  std::vector<double> x(axes.size());
  for (std::size_t a = 0; a < axes.size(); ++a) x[a] = axes[a].coord(idx[a]);
  return x;
}

void GridSpec::validate() const {
  for (const auto& ax : axes) {
    if (ax.collapsed) continue;
    if (ax.count < 8) throw ConfigError("axis '" + ax.name + "' needs >= 8 samples");
    if (!(ax.hi > ax.lo)) throw ConfigError("axis '" + ax.name + "' has empty extent");
  }
  if (nt < 8) throw ConfigError("time axis needs >= 8 samples");
  if (!(t1 > 0.0)) throw ConfigError("time window must be positive");
  if (t_lo >= 0.0 && t_lo >= t1) throw ConfigError("t_lo must sit below the horizon");
}

GridSpec default_grid(const EvolvingModel& model, int nx, int nt, double t_lo) {
  GridSpec g;
  g.nt = nt;
  g.t1 = model.horizon;
  g.t_lo = t_lo;
  switch (model.kind) {
    case ModelKind::ConformalCircle: {
      g.axes.push_back({"theta", nx, 0.0, 2.0 * kPi, true, false, 0.0,
                        AxisEnd::Periodic, AxisEnd::Periodic});
      break;
    }
    case ModelKind::ConformalTorus: {
      for (int a = 0; a < model.n; ++a)
        g.axes.push_back({"x" + std::to_string(a), nx, 0.0, 2.0 * kPi, true, false, 0.0,
                          AxisEnd::Periodic, AxisEnd::Periodic});
      break;
    }
    case ModelKind::ShrinkingSphere: {
      g.axes.push_back({"theta", nx, 0.0, kPi, false, false, 0.0,
                        AxisEnd::Pole, AxisEnd::Pole});
      for (int a = 1; a < model.n; ++a) {
        AxisSpec ax{"phi" + std::to_string(a), 1, 0.0, 2.0 * kPi, false, true, kPi / 2.0,
                    AxisEnd::Periodic, AxisEnd::Periodic};
        if (a + 1 < model.n) ax.fixed = kPi / 2.0;  // interior colatitude value
        g.axes.push_back(ax);
      }
      break;
    }
    case ModelKind::StaticHyperbolic: {
      g.axes.push_back({"r", nx, 0.0, model.chart_radius, false, false, 0.0,
                        AxisEnd::Pole, AxisEnd::Neumann});
      for (int a = 1; a < model.n; ++a) {
        AxisSpec ax{"phi" + std::to_string(a), 1, 0.0, 2.0 * kPi, false, true, kPi / 2.0,
                    AxisEnd::Periodic, AxisEnd::Periodic};
        g.axes.push_back(ax);
      }
      break;
    }
  }
  g.validate();
  return g;
}

GridSpec torus_line_grid(const EvolvingModel& model, int nx, int nt, double t_lo) {
  if (model.kind != ModelKind::ConformalTorus)
    throw ConfigError("torus_line_grid applies to conformal_torus only");
  GridSpec g = default_grid(model, nx, nt, t_lo);
  for (std::size_t a = 1; a < g.axes.size(); ++a) {
    g.axes[a].collapsed = true;
    g.axes[a].count = 1;
    g.axes[a].fixed = kPi;
  }
  return g;
}

GridSpec refined(const GridSpec& grid, int levels) {
  GridSpec g = grid;
  for (int l = 0; l < levels; ++l) {
    for (auto& ax : g.axes) {
      if (ax.collapsed) continue;
      ax.count = ax.periodic ? ax.count * 2 : ax.count * 2 - 1;
    }
    g.nt = g.nt * 2 - 1;
  }
  return g;
}

}  // namespace gradlab
