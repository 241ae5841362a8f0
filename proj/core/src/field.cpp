#include "gradlab/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gradlab {

std::string Region::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Global: os << "global"; break;
    case Kind::Ball: {
      os << "ball(rho=" << radius << ", center=[";
      for (std::size_t i = 0; i < center.size(); ++i)
        os << (i ? "," : "") << center[i];
      os << "])";
      break;
    }
    case Kind::TimeSlice: os << "slice(t=" << t_slice << ")"; break;
  }
  return os.str();
}

bool region_contains(const EvolvingModel& model, const Region& region,
                     std::span<const double> x, double t, double dt_half) {
  switch (region.kind) {
    case Region::Kind::Global: return true;
    case Region::Kind::Ball:
      return distance(model, region.center, x, t) <= region.radius;
    case Region::Kind::TimeSlice: return std::abs(t - region.t_slice) <= dt_half;
  }
  return false;
}

double sup_norm(const ScalarField& field, const Region& region) {
  const auto& g = field.grid;
  const int ns = g.spatial_size();
  const double dt_half = 0.5 * g.dt();
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (int j = 0; j < g.nt; ++j) {
    const double t = g.time(j);
    if (region.kind == Region::Kind::TimeSlice && std::abs(t - region.t_slice) > dt_half)
      continue;
    for (int s = 0; s < ns; ++s) {
      if (region.kind == Region::Kind::Ball) {
        const auto x = g.point(s);
        if (distance(field.model, region.center, x, t) > region.radius) continue;
      }
      best = std::max(best, field.at(j, s));
      any = true;
    }
  }
  if (!any) throw DomainError("sup_norm: region selects no grid nodes");
  return best;
}

double volume_integral(const ScalarField& field, int j) {
  const auto& g = field.grid;
  const double t = g.time(j);
  double acc = 0.0;
  for (int s = 0; s < g.spatial_size(); ++s) {
    const auto x = g.point(s);
    const auto idx = g.unflatten(s);
    double w = 1.0;
    bool degenerate = false;
    for (std::size_t a = 0; a < g.axes.size(); ++a) {
      const auto& ax = g.axes[a];
      if (ax.collapsed) continue;
      w *= ax.step();
      if (!ax.periodic && (idx[a] == 0 || idx[a] == ax.count - 1)) w *= 0.5;
    }
    // volume element sqrt(det g); pole rows carry zero weight in the zonal
    // charts (sin(theta) = 0), matching the continuum integral
    double sd = 0.0;
    if (field.model.in_chart(x)) {
      std::vector<double> d, dd;
      metric_diag(field.model, x, t, d, dd);
      sd = 1.0;
      for (double v : d) sd *= v;
      sd = std::sqrt(sd);
    } else {
      degenerate = true;
    }
    if (!degenerate) acc += w * sd * field.at(j, s);
  }
  return acc;
}

namespace {

// locate x on a (possibly periodic) axis: cell index i and fraction f
void locate(const AxisSpec& ax, double x, int& i, double& f) {
  const double h = ax.step();
  if (ax.periodic) {
    double u = std::fmod((x - ax.lo) / h, static_cast<double>(ax.count));
    if (u < 0.0) u += ax.count;
    i = static_cast<int>(u) % ax.count;
    f = u - std::floor(u);
  } else {
    double u = (x - ax.lo) / h;
    u = std::clamp(u, 0.0, static_cast<double>(ax.count - 1));
    i = std::min(static_cast<int>(u), ax.count - 2);
    f = u - i;
  }
}

}  // namespace

double interpolate(const GridSpec& grid, std::span<const double> values,
                   std::span<const double> x, double t) {
  int jt;
  double ft;
  {
    const double dt = grid.dt();
    double u = std::clamp(t / dt, 0.0, static_cast<double>(grid.nt - 1));
    jt = std::min(static_cast<int>(u), grid.nt - 2);
    ft = u - jt;
  }

  std::vector<int> base;
  std::vector<double> frac;
  std::vector<int> res_axes;
  for (std::size_t a = 0; a < grid.axes.size(); ++a) {
    const auto& ax = grid.axes[a];
    if (ax.collapsed) continue;
    int i;
    double f;
    locate(ax, x[a], i, f);
    base.push_back(i);
    frac.push_back(f);
    res_axes.push_back(static_cast<int>(a));
  }

  const int m = static_cast<int>(base.size());
  const int corners = 1 << m;
  double out = 0.0;
  std::vector<int> idx(grid.axes.size(), 0);
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    for (int b = 0; b < m; ++b) {
      const auto& ax = grid.axes[res_axes[b]];
      int i = base[b];
      if (c & (1 << b)) {
        i = ax.periodic ? (i + 1) % ax.count : i + 1;
        w *= frac[b];
      } else {
        w *= 1.0 - frac[b];
      }
      idx[res_axes[b]] = i;
    }
    const int s = grid.flatten(idx);
    const double v0 = values[grid.node(jt, s)];
    const double v1 = values[grid.node(jt + 1, s)];
    out += w * ((1.0 - ft) * v0 + ft * v1);
  }
  return out;
}

}  // namespace gradlab
