#include "gradlab/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace gradlab {

namespace {

constexpr double kPi = std::numbers::pi;

// Hyperspherical diagonal factors for the unit round sphere S^m with angles
// t_1..t_m: e_1 = 1, e_a = prod_{k<a} sin^2 t_k.  Partials: for j < a,
// d(e_a)/d(t_j) = 2 cot(t_j) e_a.
void unit_sphere_diag(std::span<const double> ang, std::vector<double>& e,
                      std::vector<double>& de) {
  const int m = static_cast<int>(ang.size());
  e.assign(m, 1.0);
  de.assign(static_cast<std::size_t>(m) * m, 0.0);
  for (int a = 1; a < m; ++a) e[a] = e[a - 1] * sq(std::sin(ang[a - 1]));
  for (int a = 0; a < m; ++a)
    for (int j = 0; j < a; ++j)
      de[static_cast<std::size_t>(a) * m + j] = 2.0 * e[a] / std::tan(ang[j]);
}

// Embed hyperspherical angles (m of them) as a unit vector in R^{m+1}.
std::vector<double> embed_angles(std::span<const double> ang) {
  const int m = static_cast<int>(ang.size());
  std::vector<double> p(m + 1);
  double s = 1.0;
  for (int i = 0; i < m; ++i) {
    p[i] = s * std::cos(ang[i]);
    s *= std::sin(ang[i]);
  }
  p[m] = s;
  return p;
}

double clamped_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] * b[i];
  return std::clamp(d, -1.0, 1.0);
}

double wrap_pi(double d) {
  d = std::fmod(d, 2.0 * kPi);
  if (d > kPi) d -= 2.0 * kPi;
  if (d < -kPi) d += 2.0 * kPi;
  return d;
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::ShrinkingSphere: return "shrinking_sphere";
    case ModelKind::ConformalCircle: return "conformal_circle";
    case ModelKind::ConformalTorus: return "conformal_torus";
    case ModelKind::StaticHyperbolic: return "static_hyperbolic";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "shrinking_sphere") return ModelKind::ShrinkingSphere;
  if (name == "conformal_circle") return ModelKind::ConformalCircle;
  if (name == "conformal_torus") return ModelKind::ConformalTorus;
  if (name == "static_hyperbolic") return ModelKind::StaticHyperbolic;
  throw ConfigError("unknown model kind: " + name);
}

double ScaleProfile::value(double t) const { return base + amp * std::sin(omega * t); }
double ScaleProfile::rate(double t) const { return amp * omega * std::cos(omega * t); }

EvolvingModel EvolvingModel::shrinking_sphere(int n, double c0, double T, double band) {
  if (n < 2) throw ConfigError("shrinking_sphere requires dimension n >= 2");
  if (c0 <= 0.0) throw ConfigError("shrinking_sphere requires c0 > 0");
  EvolvingModel m;
  m.kind = ModelKind::ShrinkingSphere;
  m.n = n;
  m.c0 = c0;
  m.horizon = T;
  m.band = band;
  return m;
}

EvolvingModel EvolvingModel::conformal_circle(ScaleProfile a, double T) {
  EvolvingModel m;
  m.kind = ModelKind::ConformalCircle;
  m.n = 1;
  m.scale = a;
  m.horizon = T;
  return m;
}

EvolvingModel EvolvingModel::conformal_torus(int n, ScaleProfile a, double T) {
  if (n < 1) throw ConfigError("conformal_torus requires dimension n >= 1");
  EvolvingModel m;
  m.kind = ModelKind::ConformalTorus;
  m.n = n;
  m.scale = a;
  m.horizon = T;
  return m;
}

EvolvingModel EvolvingModel::static_hyperbolic(int n, double kappa, double R, double T,
                                               double band) {
  if (n < 2) throw ConfigError("static_hyperbolic requires dimension n >= 2");
  if (kappa <= 0.0) throw ConfigError("static_hyperbolic requires kappa > 0");
  if (R <= 0.0) throw ConfigError("static_hyperbolic requires chart radius R > 0");
  EvolvingModel m;
  m.kind = ModelKind::StaticHyperbolic;
  m.n = n;
  m.kappa = kappa;
  m.chart_radius = R;
  m.horizon = T;
  m.band = band;
  return m;
}

double EvolvingModel::sphere_factor(double t) const { return c0 - (n - 1) * t; }

double EvolvingModel::ricci_factor(double t) const {
  switch (kind) {
    case ModelKind::ShrinkingSphere: return (n - 1) / sphere_factor(t);
    case ModelKind::StaticHyperbolic: return -(n - 1) * kappa;
    default: return 0.0;  // flat
  }
}

double EvolvingModel::dtg_factor(double t) const {
  switch (kind) {
    case ModelKind::ShrinkingSphere: return -(n - 1) / sphere_factor(t);
    case ModelKind::ConformalCircle:
    case ModelKind::ConformalTorus: return 2.0 * scale.rate(t) / scale.value(t);
    default: return 0.0;
  }
}

void EvolvingModel::require_time(double t) const {
  if (!(t >= 0.0 && t <= horizon))
    throw DomainError("time " + std::to_string(t) + " outside window [0, " +
                      std::to_string(horizon) + "]");
  if (kind == ModelKind::ShrinkingSphere && sphere_factor(t) <= 0.0)
    throw DomainError("sphere collapsed at t = " + std::to_string(t));
  if ((kind == ModelKind::ConformalCircle || kind == ModelKind::ConformalTorus) &&
      scale.value(t) <= 0.0)
    throw DomainError("scale profile nonpositive at t = " + std::to_string(t));
}

bool EvolvingModel::in_chart(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n) return false;
  switch (kind) {
    case ModelKind::ShrinkingSphere:
      // colatitude angles strictly inside (0, pi); longitude unconstrained
      for (int i = 0; i + 1 < n; ++i)
        if (!(x[i] > 0.0 && x[i] < kPi)) return false;
      return true;
    case ModelKind::StaticHyperbolic:
      if (!(x[0] > 0.0 && x[0] <= chart_radius)) return false;
      for (int i = 1; i + 1 < n; ++i)
        if (!(x[i] > 0.0 && x[i] < kPi)) return false;
      return true;
    default:
      return true;  // periodic charts cover everything
  }
}

void EvolvingModel::require_chart(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n)
    throw DomainError("chart point has wrong dimension");
  if (!in_chart(x)) throw DomainError("point outside chart for " + to_string(kind));
}

bool EvolvingModel::in_band(std::span<const double> x) const {
  switch (kind) {
    case ModelKind::ShrinkingSphere:
      for (int i = 0; i + 1 < n; ++i)
        if (x[i] < band || x[i] > kPi - band) return true;
      return false;
    case ModelKind::StaticHyperbolic:
      if (x[0] < band) return true;
      for (int i = 1; i + 1 < n; ++i)
        if (x[i] < band || x[i] > kPi - band) return true;
      return false;
    default:
      return false;
  }
}

std::string EvolvingModel::describe() const {
  std::ostringstream os;
  os << to_string(kind) << "(n=" << n;
  switch (kind) {
    case ModelKind::ShrinkingSphere: os << ", c0=" << c0; break;
    case ModelKind::ConformalCircle:
    case ModelKind::ConformalTorus:
      os << ", a=" << scale.base << "+" << scale.amp << "*sin(" << scale.omega << " t)";
      break;
    case ModelKind::StaticHyperbolic:
      os << ", kappa=" << kappa << ", R=" << chart_radius;
      break;
  }
  os << ", T=" << horizon << ")";
  return os.str();
}

void metric_diag(const EvolvingModel& model, std::span<const double> x, double t,
                 std::vector<double>& d, std::vector<double>& dd) {
  const int n = model.n;
  d.assign(n, 0.0);
  dd.assign(static_cast<std::size_t>(n) * n, 0.0);
  switch (model.kind) {
    case ModelKind::ShrinkingSphere: {
      const double c = model.sphere_factor(t);
      std::vector<double> e, de;
      unit_sphere_diag(x, e, de);
      for (int a = 0; a < n; ++a) d[a] = c * e[a];
      for (std::size_t i = 0; i < de.size(); ++i) dd[i] = c * de[i];
      break;
    }
    case ModelKind::ConformalCircle:
    case ModelKind::ConformalTorus: {
      const double a2 = sq(model.scale.value(t));
      for (int a = 0; a < n; ++a) d[a] = a2;
      break;
    }
    case ModelKind::StaticHyperbolic: {
      const double sk = std::sqrt(model.kappa);
      const double s = std::sinh(sk * x[0]) / sk;     // warped radius
      const double sp = std::cosh(sk * x[0]);         // ds/dr
      d[0] = 1.0;
      if (n > 1) {
        std::vector<double> e, de;
        std::span<const double> ang(x.data() + 1, static_cast<std::size_t>(n - 1));
        unit_sphere_diag(ang, e, de);
        for (int a = 1; a < n; ++a) {
          d[a] = sq(s) * e[a - 1];
          dd[static_cast<std::size_t>(a) * n + 0] = 2.0 * s * sp * e[a - 1];
          for (int j = 1; j < a; ++j)
            dd[static_cast<std::size_t>(a) * n + j] =
                sq(s) * de[static_cast<std::size_t>(a - 1) * (n - 1) + (j - 1)];
        }
      }
      break;
    }
  }
}

MetricData metric_data(const EvolvingModel& model, std::span<const double> x, double t) {
  model.require_time(t);
  model.require_chart(x);
  const int n = model.n;

  std::vector<double> d, dd;
  metric_diag(model, x, t, d, dd);

  MetricData md;
  md.n = n;
  md.g.assign(static_cast<std::size_t>(n) * n, 0.0);
  md.g_inv.assign(static_cast<std::size_t>(n) * n, 0.0);
  md.ricci.assign(static_cast<std::size_t>(n) * n, 0.0);
  md.dt_g.assign(static_cast<std::size_t>(n) * n, 0.0);
  md.christoffel.assign(static_cast<std::size_t>(n) * n * n, 0.0);

  double det = 1.0;
  const double rf = model.ricci_factor(t);
  const double df = model.dtg_factor(t);
  for (int a = 0; a < n; ++a) {
    if (!(d[a] > 0.0))
      throw DomainError("degenerate metric entry at chart point (axis " +
                        std::to_string(a) + ")");
    md.g[a * n + a] = d[a];
    md.g_inv[a * n + a] = 1.0 / d[a];
    md.ricci[a * n + a] = rf * d[a];
    md.dt_g[a * n + a] = df * d[a];
    det *= d[a];
  }
  md.sqrt_det = std::sqrt(det);

  // Diagonal-metric Christoffel symbols.
  auto pd = [&](int a, int j) { return dd[static_cast<std::size_t>(a) * n + j]; };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        md.christoffel[(i * n + i) * n + i] = pd(i, i) / (2.0 * d[i]);
      } else {
        const double gij = pd(i, j) / (2.0 * d[i]);  // Gamma^i_{ij} = Gamma^i_{ji}
        md.christoffel[(i * n + i) * n + j] = gij;
        md.christoffel[(i * n + j) * n + i] = gij;
        md.christoffel[(i * n + j) * n + j] = -pd(j, i) / (2.0 * d[i]);  // Gamma^i_{jj}
      }
    }
  }

  // dt g is a time function times g in every model, so its covariant
  // derivative vanishes identically.
  md.grad_dt_g_norm = 0.0;
  return md;
}

std::vector<double> r_tensor(const EvolvingModel& model, std::span<const double> x,
                             double t) {
  MetricData md = metric_data(model, x, t);
  std::vector<double> r(md.g.size());
  const double f = model.rt_factor(t);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = f * md.g[i];
  return r;
}

double distance(const EvolvingModel& model, std::span<const double> x0,
                std::span<const double> x, double t) {
  model.require_time(t);
  const int n = model.n;
  if (static_cast<int>(x0.size()) != n || static_cast<int>(x.size()) != n)
    throw DomainError("distance: point dimension mismatch");
  switch (model.kind) {
    case ModelKind::ShrinkingSphere: {
      const double angle = std::acos(clamped_dot(embed_angles(x0), embed_angles(x)));
      return std::sqrt(model.sphere_factor(t)) * angle;
    }
    case ModelKind::ConformalCircle:
    case ModelKind::ConformalTorus: {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += sq(wrap_pi(x[i] - x0[i]));
      return model.scale.value(t) * std::sqrt(s);
    }
    case ModelKind::StaticHyperbolic: {
      const double sk = std::sqrt(model.kappa);
      const double r1 = x0[0], r2 = x[0];
      double cg = 1.0;
      if (n >= 2) {
        std::span<const double> a1(x0.data() + 1, static_cast<std::size_t>(n - 1));
        std::span<const double> a2(x.data() + 1, static_cast<std::size_t>(n - 1));
        cg = clamped_dot(embed_angles(a1), embed_angles(a2));
      }
      const double arg = std::cosh(sk * r1) * std::cosh(sk * r2) -
                         std::sinh(sk * r1) * std::sinh(sk * r2) * cg;
      return std::acosh(std::max(arg, 1.0)) / sk;
    }
  }
  return 0.0;
}

double dt_distance(const EvolvingModel& model, std::span<const double> x0,
                   std::span<const double> x, double t) {
  // rho_t = scale(t) * (static separation) for sphere/circle/torus; 0 if static.
  switch (model.kind) {
    case ModelKind::ShrinkingSphere: {
      const double c = model.sphere_factor(t);
      const double cdot = -(model.n - 1);
      return 0.5 * cdot / c * distance(model, x0, x, t);
    }
    case ModelKind::ConformalCircle:
    case ModelKind::ConformalTorus: {
      const double a = model.scale.value(t);
      return model.scale.rate(t) / a * distance(model, x0, x, t);
    }
    case ModelKind::StaticHyperbolic: return 0.0;
  }
  return 0.0;
}

ValidityReport model_validity(const EvolvingModel& model) {
  ValidityReport rep;
  switch (model.kind) {
    case ModelKind::ShrinkingSphere: {
      const double t_collapse = model.c0 / (model.n - 1);
      if (model.horizon >= t_collapse) {
        rep.valid = false;
        rep.first_violation_time = t_collapse;
        rep.detail = "sphere conformal factor reaches zero inside the window";
      }
      break;
    }
    case ModelKind::ConformalCircle:
    case ModelKind::ConformalTorus: {
      // dense scan; profiles are smooth closed forms
      const int samples = 4096;
      for (int i = 0; i <= samples; ++i) {
        const double t = model.horizon * i / samples;
        if (model.scale.value(t) <= 0.0) {
          rep.valid = false;
          rep.first_violation_time = t;
          rep.detail = "scale profile nonpositive";
          break;
        }
      }
      break;
    }
    case ModelKind::StaticHyperbolic: break;
  }
  return rep;
}

std::vector<double> sphere_embed(std::span<const double> angles) {
  return embed_angles(angles);
}

std::vector<double> sphere_angles(std::span<const double> p) {
  const int m = static_cast<int>(p.size()) - 1;
  std::vector<double> ang(m);
  double s = 1.0;
  for (int i = 0; i + 1 < m; ++i) {
    // colatitudes; s carries the accumulated sine product
    const double c = s > 1e-300 ? std::clamp(p[i] / s, -1.0, 1.0) : 1.0;
    ang[i] = std::acos(c);
    s *= std::sin(ang[i]);
  }
  if (m >= 1) {
    double az = std::atan2(p[m], p[m - 1]);
    if (az < 0.0) az += 2.0 * kPi;
    ang[m - 1] = az;
  }
  return ang;
}

}  // namespace gradlab
