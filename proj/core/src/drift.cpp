#include "gradlab/drift.hpp"

#include <cmath>
#include <sstream>

#include "gradlab/gridops.hpp"
#include "gradlab/quadrature.hpp"

namespace gradlab {

std::string to_string(FunctionalKind kind) {
  switch (kind) {
    case FunctionalKind::HamiltonH: return "hamilton_h";
    case FunctionalKind::LiYauSTilde: return "liyau_s_tilde";
    case FunctionalKind::RicciSHat: return "ricci_s_hat";
  }
  return "unknown";
}

FunctionalKind functional_kind_from_string(const std::string& name) {
  if (name == "hamilton_h") return FunctionalKind::HamiltonH;
  if (name == "liyau_s_tilde") return FunctionalKind::LiYauSTilde;
  if (name == "ricci_s_hat") return FunctionalKind::RicciSHat;
  throw ConfigError("unknown functional kind: " + name);
}

double s_tilde_rate_const(const FunctionalSpec& spec) {
  if (spec.alpha <= 1.0) throw ConfigError("S-tilde requires alpha > 1");
  const BoundSet& b = spec.bounds;
  return std::max(b.k2, b.k3) + b.k3 + std::sqrt(2.0 * b.k4) +
         (b.k1 + b.k4) / (spec.alpha - 1.0);
}

HProfile h_profile(const FunctionalSpec& spec) {
  HProfile prof;
  const double T = spec.horizon;
  switch (spec.kind) {
    case FunctionalKind::HamiltonH: {
      const KProfile& k = spec.bounds.k;
      if (k.constant) {
        const double kv = k.value;
        prof.rate_const = kv;
        if (kv == 0.0) {
          prof.h = [](double t) { return 0.5 * t; };
          prof.desc = "t/2";
        } else {
          prof.h = [kv](double t) { return (1.0 - std::exp(-kv * t)) / (2.0 * kv); };
          std::ostringstream os;
          os << "(1 - exp(-" << kv << " t)) / " << 2.0 * kv;
          prof.desc = os.str();
        }
      } else {
        // h(t) = (1/2) exp(-F(t)) Int_0^t exp(F(s)) ds with F(t) = Int_0^t k
        auto kf = k.fn;
        auto F = [kf](double t) {
          return integrate([&](double r) { return kf(r); }, 0.0, t, 1e-14);
        };
        prof.h = [kf, F](double t) {
          const double Ft = F(t);
          const double G =
              integrate([&](double s) { return std::exp(F(s)); }, 0.0, t, 1e-14);
          return 0.5 * std::exp(-Ft) * G;
        };
        prof.desc = "quadrature[" + k.desc + "]";
      }
      break;
    }
    case FunctionalKind::LiYauSTilde: {
      const double C = s_tilde_rate_const(spec);
      prof.rate_const = C;
      prof.h = [T, C](double t) { return sq(t / T) * std::exp(-C * (T - t)); };
      prof.hy = [T, C](double t) {
        return t / sq(T) * (2.0 + C * t) * std::exp(-C * (T - t));
      };
      std::ostringstream os;
      os << "(t/T)^2 exp(-" << C << " (T - t))";
      prof.desc = os.str();
      break;
    }
    case FunctionalKind::RicciSHat: {
      const double k = spec.ric_upper;
      prof.rate_const = k;
      prof.h = [T, k](double t) { return sq(t / T) * std::exp(-k * (T - t)); };
      prof.hy = [T, k](double t) {
        return t / sq(T) * (2.0 + k * t) * std::exp(-k * (T - t));
      };
      std::ostringstream os;
      os << "(t/T)^2 exp(-" << k << " (T - t))";
      prof.desc = os.str();
      break;
    }
  }
  return prof;
}

double h_identity_max_relerr(const FunctionalSpec& spec, const HProfile& prof,
                             int samples) {
  if (spec.kind != FunctionalKind::HamiltonH)
    throw ConfigError("the h identity applies to the Hamilton profile");
  const double T = spec.horizon;
  const double delta = std::min(1e-4, T / 1000.0);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = T * (i + 0.5) / samples;
    const double hdot = (prof.h(t - 2.0 * delta) - 8.0 * prof.h(t - delta) +
                         8.0 * prof.h(t + delta) - prof.h(t + 2.0 * delta)) /
                        (12.0 * delta);
    const double lhs = hdot + spec.bounds.k(t) * prof.h(t);
    worst = std::max(worst, std::abs(lhs - 0.5) / 0.5);
  }
  return worst;
}

QuantityField functional_field(const FunctionalSpec& spec, const ScalarField& field,
                               const HProfile& prof) {
  const GridSpec& grid = field.grid;
  const EvolvingModel& model = field.model;
  if (spec.kind == FunctionalKind::RicciSHat && model.kind != ModelKind::ShrinkingSphere)
    throw ConfigError("the Ricci functional is defined on the shrinking sphere");
  if (spec.kind == FunctionalKind::LiYauSTilde && spec.alpha <= 1.0)
    throw ConfigError("S-tilde requires alpha > 1");

  QuantityField qf = differentiate(field, "q");
  QuantityField lap;
  if (spec.kind != FunctionalKind::HamiltonH) lap = differentiate(field, "laplacian");

  QuantityField out;
  out.name = to_string(spec.kind);
  out.grid = grid;
  out.values.assign(static_cast<std::size_t>(grid.size()), 0.0);
  out.valid.assign(static_cast<std::size_t>(grid.size()), 0);

  const int ns = grid.spatial_size();
  const double beta = sq(spec.alpha);
  for (int j = 0; j < grid.nt; ++j) {
    const double t = grid.time(j);
    const double h = prof.h(t);
    const double hy = prof.hy ? prof.hy(t) : 0.0;
    for (int s = 0; s < ns; ++s) {
      const int node = grid.node(j, s);
      if (!qf.valid[node]) continue;
      const double u = field.at(j, s);
      switch (spec.kind) {
        case FunctionalKind::HamiltonH:
          out.values[node] = h * qf.values[node] + u * std::log(u);
          out.valid[node] = 1;
          break;
        case FunctionalKind::LiYauSTilde:
          if (!lap.valid[node]) continue;
          out.values[node] = h * (qf.values[node] - spec.alpha * lap.values[node]) -
                             model.n * beta * u * hy;
          out.valid[node] = 1;
          break;
        case FunctionalKind::RicciSHat:
          if (!lap.valid[node]) continue;
          out.values[node] =
              h * (qf.values[node] - lap.values[node]) - model.n * u * hy;
          out.valid[node] = 1;
          break;
      }
    }
  }
  return out;
}

DriftReport drift_field(const FunctionalSpec& spec, const ScalarField& field,
                        const HProfile& prof, double tol) {
  const GridSpec& grid = field.grid;
  const EvolvingModel& model = field.model;
  QuantityField phi = functional_field(spec, field, prof);

  DriftReport rep;
  rep.kind = to_string(spec.kind);
  rep.tolerance = tol;
  rep.masked_sup = -std::numeric_limits<double>::infinity();
  rep.drift.name = rep.kind + "_drift";
  rep.drift.grid = grid;
  rep.drift.values.assign(static_cast<std::size_t>(grid.size()), 0.0);
  rep.drift.valid.assign(static_cast<std::size_t>(grid.size()), 0);

  SpatialStencil st(grid);
  const int ns = grid.spatial_size();
  const double t_floor = grid.mask_floor();
  for (int j = 0; j < grid.nt; ++j) {
    const double t = grid.time(j);
    std::span<const double> slice(phi.values.data() + static_cast<std::size_t>(j) * ns,
                                  ns);
    for (int s = 0; s < ns; ++s) {
      const int node = grid.node(j, s);
      if (!phi.valid[node] || !st.interior(s)) continue;
      const std::vector<double> x = grid.point(s);
      if (!model.in_chart(x) || model.in_band(x)) continue;
      double lap_phi = 0.0;
      if (!laplacian_scalar(model, st, slice, s, t, lap_phi)) continue;
      const double dval = time_deriv(grid, phi.values, j, s) - 0.5 * lap_phi;
      rep.drift.values[node] = dval;
      rep.drift.valid[node] = 1;
      if (t < t_floor) continue;  // stored for CSV, excluded from the verdict
      ++rep.masked_count;
      if (dval > rep.masked_sup) {
        rep.masked_sup = dval;
        rep.worst_row = j;
        rep.worst_node = s;
      }
    }
  }
  if (rep.masked_count == 0) throw DomainError("drift verdict mask is empty");
  rep.pass = rep.masked_sup <= tol;
  return rep;
}

}  // namespace gradlab
