#include "gradlab/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>

#include "gradlab/common.hpp"
#include "gradlab/drift.hpp"

namespace gradlab {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string> kTheorems = {
    "hamilton_global",
    "hamilton_local",
    "hamilton_local_general",
    "liyau_local",
    "liyau_local_general",
    "liyau_global",
    "liyau_lower_order_local",
    "liyau_lower_order_general",
    "ricci_compact",
    "ricci_local_pair",
};

// Derived stencil fields shared by the individual checks.  lap stays empty
// for the Hamilton family, which never touches Lap u.
struct CheckInput {
  const ScalarField& field;
  const CheckRequest& req;
  const BoundSet& bounds;
  QuantityField grad_sq;
  QuantityField lap;
  std::vector<std::vector<double>> points;  // chart coordinates per spatial node
  double t_floor = 0.0;

  bool has_lap() const { return !lap.values.empty(); }
};

CheckInput make_input(const ScalarField& field, const CheckRequest& req,
                      const BoundSet& bounds, bool with_lap) {
  CheckInput in{field, req, bounds, differentiate(field, "grad_sq"), {}, {}, 0.0};
  if (with_lap) in.lap = differentiate(field, "laplacian");
  const int ns = field.grid.spatial_size();
  in.points.resize(ns);
  for (int s = 0; s < ns; ++s) in.points[s] = field.grid.point(s);
  in.t_floor = field.grid.mask_floor() - 1e-12;
  return in;
}

InequalityReport blank_report(const CheckInput& in, std::string theorem,
                              double tolerance) {
  InequalityReport rep;
  rep.theorem = std::move(theorem);
  rep.grid = in.field.grid;
  rep.tolerance = tolerance;
  rep.lhs.assign(rep.grid.size(), kNaN);
  rep.rhs.assign(rep.grid.size(), kNaN);
  rep.mask.assign(rep.grid.size(), 0);
  return rep;
}

void finalize(InequalityReport& rep) {
  rep.min_slack = std::numeric_limits<double>::infinity();
  for (int j = 0; j < rep.grid.nt; ++j) {
    for (int s = 0; s < rep.grid.spatial_size(); ++s) {
      const int node = rep.grid.node(j, s);
      if (!rep.mask[node]) continue;
      ++rep.masked_count;
      const double slack = rep.rhs[node] - rep.lhs[node];
      if (slack < rep.min_slack) {
        rep.min_slack = slack;
        rep.worst_row = j;
        rep.worst_node = s;
      }
      if (slack < -rep.tolerance) ++rep.violations;
    }
  }
  if (rep.masked_count == 0)
    throw DomainError("check '" + rep.theorem + "' selects no grid node");
}

// Fills the three arrays row by row and finalizes.  Every bound here carries
// a 1/t, so t = 0 rows stay NaN and unmasked.
template <typename LhsFn, typename RhsFn, typename KeepFn>
void fill(InequalityReport& rep, const CheckInput& in, LhsFn&& lhs_at,
          RhsFn&& rhs_at, KeepFn&& keep) {
  const GridSpec& grid = rep.grid;
  for (int j = 0; j < grid.nt; ++j) {
    const double t = grid.time(j);
    if (t <= 0.0) continue;
    for (int s = 0; s < grid.spatial_size(); ++s) {
      const int node = grid.node(j, s);
      rep.lhs[node] = lhs_at(j, s);
      rep.rhs[node] = rhs_at(j, s, t);
      rep.mask[node] = (t >= in.t_floor && keep(j, s)) ? 1 : 0;
    }
  }
  finalize(rep);
}

void require_alpha(const CheckRequest& req) {
  if (!(req.alpha > 1.0))
    throw ConfigError("'" + req.theorem + "' needs alpha > 1, got " +
                      std::to_string(req.alpha));
}

void require_ball(const CheckRequest& req, const EvolvingModel& model) {
  if (!(req.rho > 0.0)) throw ConfigError("'" + req.theorem + "' needs rho > 0");
  if (static_cast<int>(req.center.size()) != model.n)
    throw ConfigError("'" + req.theorem + "' needs a ball center with " +
                      std::to_string(model.n) + " chart coordinates");
}

// 0 <= Ric <= k over the window.  Only the shrinking sphere satisfies the
// flow coupling dt g = -Ric here.
double ricci_upper(const EvolvingModel& model, const std::string& theorem) {
  if (model.kind != ModelKind::ShrinkingSphere)
    throw ConfigError("'" + theorem + "' needs the shrinking-sphere model");
  return ricci_upper_bound(model);
}

// 1/h(t) of the Hamilton coefficient.  The vanishing-k path divides by t
// directly so the classical estimate carries no quadrature residue.
std::function<double(double)> hamilton_coefficient(const CheckInput& in) {
  const KProfile& k = in.bounds.k;
  if (k.constant && k.value == 0.0) {
    return [](double t) { return 2.0 / t; };
  }
  FunctionalSpec spec;
  spec.kind = FunctionalKind::HamiltonH;
  spec.bounds = in.bounds;
  spec.horizon = in.field.model.horizon;
  auto h = h_profile(spec).h;
  return [h = std::move(h)](double t) { return 1.0 / h(t); };
}

// Curvature offset shared by the Li-Yau family (everything next to 2/t).
double liyau_rate(const BoundSet& b, double alpha) {
  return std::max(b.k2, b.k3) + b.k3 + std::sqrt(2.0 * b.k4) +
         (b.k1 + b.k4) / (alpha - 1.0);
}

// Predicate factory: node inside the closed g_t-ball of the given radius.
std::function<bool(int, int)> ball_keeper(const CheckInput& in, double radius) {
  Region reg = Region::ball(in.req.center, radius);
  const double dt_half = 0.5 * in.field.grid.dt();
  return [&in, reg = std::move(reg), dt_half](int j, int s) {
    return region_contains(in.field.model, reg, in.points[s],
                           in.field.grid.time(j), dt_half);
  };
}

double phi_grad_phi_sup(const CutoffProfile& cut) {
  double best = -std::numeric_limits<double>::infinity();
  long count = 0;
  for (std::size_t i = 0; i < cut.phi.size(); ++i) {
    if (!cut.valid[i]) continue;
    best = std::max(best, cut.phi[i] * std::sqrt(cut.grad_phi_sq[i]));
    ++count;
  }
  if (count == 0) throw DomainError("phi grad phi sup: no admissible node");
  return best;
}

InequalityReport hamilton_global_check(const CheckInput& in, double tol) {
  auto rep = blank_report(in, "hamilton_global", tol);
  const double sup_u = sup_norm(in.field, Region::global());
  auto coef = hamilton_coefficient(in);
  rep.constants["sup_u"] = sup_u;
  if (in.bounds.k.constant) rep.constants["k"] = in.bounds.k.value;
  rep.constants["coef_at_horizon"] = coef(in.field.grid.t1);
  fill(
      rep, in,
      [&](int j, int s) {
        const double u = in.field.at(j, s);
        return in.grad_sq.at(j, s) / (u * u);
      },
      [&](int j, int s, double t) {
        return coef(t) * std::log(sup_u / in.field.at(j, s));
      },
      [&](int j, int s) { return in.grad_sq.ok(j, s); });
  return rep;
}

InequalityReport hamilton_local_check(const CheckInput& in, double tol) {
  auto rep = blank_report(in, "hamilton_local", tol);
  const double n = in.field.model.n;
  const double rho = in.req.rho;
  const double denom = sq(4.0 - kPi);
  const double geom = 4.0 * kPi * kPi * (n + 7.0) / (denom * rho * rho);
  const double curv = (kPi * kPi + 16.0) * (in.bounds.k1 + in.bounds.k2) / denom;
  const double sup_u = sup_norm(in.field, Region::ball(in.req.center, rho));
  rep.constants["sup_u_ball"] = sup_u;
  rep.constants["geom_term"] = geom;
  rep.constants["curvature_term"] = curv;
  auto in_half = ball_keeper(in, 0.5 * rho);
  fill(
      rep, in,
      [&](int j, int s) {
        const double u = in.field.at(j, s);
        return in.grad_sq.at(j, s) / (u * u);
      },
      [&](int j, int s, double t) {
        const double bracket = 1.0 / t + geom + curv;
        return 2.0 * bracket * sq(4.0 + std::log(sup_u / in.field.at(j, s)));
      },
      [&](int j, int s) { return in.grad_sq.ok(j, s) && in_half(j, s); });
  return rep;
}

InequalityReport hamilton_local_general_check(const CheckInput& in, double tol) {
  auto rep = blank_report(in, "hamilton_local_general", tol);
  CutoffProfile cut = build_cutoff(in.field.model, in.field.grid, in.req.center,
                                   in.req.rho, in.req.shape);
  CPhiReport c7 = c_phi(cut, CPhiVariant::Hamilton7, in.bounds);
  const double sup_u = sup_norm(in.field, Region::ball(in.req.center, in.req.rho));
  const double curv = in.bounds.k1 + in.bounds.k2;
  rep.constants["sup_u_ball"] = sup_u;
  rep.constants["c_phi_7"] = c7.numeric_sup;
  rep.constants["c_phi_7_analytic"] = c7.analytic_bound;
  fill(
      rep, in,
      [&](int j, int s) {
        const double u = in.field.at(j, s);
        return in.grad_sq.at(j, s) / (u * u);
      },
      [&](int j, int s, double t) {
        const double phi = cut.phi[rep.grid.node(j, s)];
        return 2.0 * (1.0 / t + c7.numeric_sup / (phi * phi) + curv) *
               sq(4.0 + std::log(sup_u / in.field.at(j, s)));
      },
      [&](int j, int s) {
        return in.grad_sq.ok(j, s) && cut.in_ball[rep.grid.node(j, s)];
      });
  return rep;
}

InequalityReport liyau_local_check(const CheckInput& in, double tol) {
  auto rep = blank_report(in, "liyau_local", tol);
  const double n = in.field.model.n;
  const double alpha = in.req.alpha;
  const double rho = in.req.rho;
  const double denom = sq(4.0 - kPi);
  const double geom = 8.0 * kPi * kPi *
                      (n + 3.0 + alpha * alpha * n / (alpha - 1.0)) /
                      (denom * rho * rho);
  const double curv = 16.0 * kPi * (in.bounds.k1 + in.bounds.k2) / denom;
  const double rate = liyau_rate(in.bounds, alpha);
  const double coef = n * alpha * alpha;
  rep.constants["geom_term"] = geom;
  rep.constants["curvature_term"] = curv;
  rep.constants["rate_term"] = rate;
  rep.constants["alpha"] = alpha;
  auto in_half = ball_keeper(in, 0.5 * rho);
  fill(
      rep, in,
      [&](int j, int s) {
        const double u = in.field.at(j, s);
        return in.grad_sq.at(j, s) / (u * u) - alpha * in.lap.at(j, s) / u;
      },
      [&](int, int, double t) { return coef * (2.0 / t + geom + curv + rate); },
      [&](int j, int s) {
        return in.grad_sq.ok(j, s) && in.lap.ok(j, s) && in_half(j, s);
      });
  return rep;
}

InequalityReport liyau_local_general_check(const CheckInput& in, double tol) {
  auto rep = blank_report(in, "liyau_local_general", tol);
  const double n = in.field.model.n;
  const double alpha = in.req.alpha;
  CutoffProfile cut = build_cutoff(in.field.model, in.field.grid, in.req.center,
                                   in.req.rho, in.req.shape);
  CPhiReport cp = c_phi(cut, CPhiVariant::LiYauAlpha, in.bounds, alpha);
  const double rate = liyau_rate(in.bounds, alpha);
  const double coef = n * alpha * alpha;
  rep.constants["c_phi_alpha"] = cp.numeric_sup;
  rep.constants["c_phi_alpha_analytic"] = cp.analytic_bound;
  rep.constants["rate_term"] = rate;
  rep.constants["alpha"] = alpha;
  fill(
      rep, in,
      [&](int j, int s) {
        const double u = in.field.at(j, s);
        return in.grad_sq.at(j, s) / (u * u) - alpha * in.lap.at(j, s) / u;
      },
      [&](int j, int s, double t) {
        const double phi = cut.phi[rep.grid.node(j, s)];
        return coef * (2.0 / t + 2.0 * cp.numeric_sup / (phi * phi) + rate);
      },
      [&](int j, int s) {
        return in.grad_sq.ok(j, s) && in.lap.ok(j, s) &&
               cut.in_ball[rep.grid.node(j, s)];
      });
  return rep;
}

InequalityReport liyau_global_check(const CheckInput& in, double tol) {
  auto rep = blank_report(in, "liyau_global", tol);
  const double n = in.field.model.n;
  const double alpha = in.req.alpha;
  const double rate = liyau_rate(in.bounds, alpha);
  const double coef = n * alpha * alpha;
  rep.constants["rate_term"] = rate;
  rep.constants["alpha"] = alpha;
  rep.constants["rhs_at_horizon"] = coef * (2.0 / in.field.grid.t1 + rate);
  fill(
      rep, in,
      [&](int j, int s) {
        const double u = in.field.at(j, s);
        return in.grad_sq.at(j, s) / (u * u) - alpha * in.lap.at(j, s) / u;
      },
      [&](int, int, double t) { return coef * (2.0 / t + rate); },
      [&](int j, int s) { return in.grad_sq.ok(j, s) && in.lap.ok(j, s); });
  return rep;
}

InequalityReport liyau_lower_order_local_check(const CheckInput& in, double tol) {
  auto rep = blank_report(in, "liyau_lower_order_local", tol);
  const double n = in.field.model.n;
  const double rho = in.req.rho;
  const double denom = sq(4.0 - kPi);
  const BoundSet& b = in.bounds;
  const double grad_sup =
      grad_ratio_sup(in.field, Region::ball(in.req.center, rho));
  const double geom = 8.0 * n * kPi * kPi * (n + 3.0) / (denom * rho * rho);
  const double curv = 16.0 * n * kPi * (b.k1 + b.k2) / denom;
  const double rate = n * std::max(b.k2, b.k3) + n * std::sqrt(2.0 * b.k4);
  const double lower_coef =
      8.0 * kPi * n / (denom * rho) + std::sqrt(2.0 * n * (b.k1 + b.k4));
  rep.constants["grad_ratio_sup"] = grad_sup;
  rep.constants["geom_term"] = geom;
  rep.constants["curvature_term"] = curv;
  rep.constants["rate_term"] = rate;
  rep.constants["lower_order_coef"] = lower_coef;
  auto in_half = ball_keeper(in, 0.5 * rho);
  fill(
      rep, in,
      [&](int j, int s) {
        const double u = in.field.at(j, s);
        return in.grad_sq.at(j, s) / (u * u) - in.lap.at(j, s) / u;
      },
      [&](int, int, double t) {
        return 2.0 * n / t + geom + curv + rate + lower_coef * grad_sup;
      },
      [&](int j, int s) {
        return in.grad_sq.ok(j, s) && in.lap.ok(j, s) && in_half(j, s);
      });
  return rep;
}

InequalityReport liyau_lower_order_general_check(const CheckInput& in, double tol) {
  auto rep = blank_report(in, "liyau_lower_order_general", tol);
  const double n = in.field.model.n;
  const BoundSet& b = in.bounds;
  CutoffProfile cut = build_cutoff(in.field.model, in.field.grid, in.req.center,
                                   in.req.rho, in.req.shape);
  CPhiReport c3 = c_phi(cut, CPhiVariant::Hamilton3, in.bounds);
  const double pgp = phi_grad_phi_sup(cut);
  const double grad_sup =
      grad_ratio_sup(in.field, Region::ball(in.req.center, in.req.rho));
  const double rate = n * std::max(b.k2, b.k3) + n * std::sqrt(2.0 * b.k4);
  const double curv_lower = std::sqrt(2.0 * n * (b.k1 + b.k4));
  rep.constants["c_phi_3"] = c3.numeric_sup;
  rep.constants["c_phi_3_analytic"] = c3.analytic_bound;
  rep.constants["phi_grad_phi_sup"] = pgp;
  rep.constants["phi_grad_phi_analytic"] = kPi / (4.0 * in.req.rho);
  rep.constants["grad_ratio_sup"] = grad_sup;
  fill(
      rep, in,
      [&](int j, int s) {
        const double u = in.field.at(j, s);
        return in.grad_sq.at(j, s) / (u * u) - in.lap.at(j, s) / u;
      },
      [&](int j, int s, double t) {
        const double phi2 = sq(cut.phi[rep.grid.node(j, s)]);
        return 2.0 * n / t + 2.0 * n * c3.numeric_sup / phi2 + rate +
               (4.0 * n * pgp / phi2 + curv_lower) * grad_sup;
      },
      [&](int j, int s) {
        return in.grad_sq.ok(j, s) && in.lap.ok(j, s) &&
               cut.in_ball[rep.grid.node(j, s)];
      });
  return rep;
}

InequalityReport ricci_compact_check(const CheckInput& in, double tol) {
  auto rep = blank_report(in, "ricci_compact", tol);
  const double n = in.field.model.n;
  const double k = ricci_upper(in.field.model, rep.theorem);
  rep.constants["ric_upper"] = k;
  rep.constants["rhs_at_horizon"] = k * n + 2.0 * n / in.field.grid.t1;
  rep.constants["bcp_rhs_at_horizon"] = 2.0 * k * n + n / in.field.grid.t1;
  fill(
      rep, in,
      [&](int j, int s) {
        const double u = in.field.at(j, s);
        return in.grad_sq.at(j, s) / (u * u) - in.lap.at(j, s) / u;
      },
      [&](int, int, double t) { return k * n + 2.0 * n / t; },
      [&](int j, int s) { return in.grad_sq.ok(j, s) && in.lap.ok(j, s); });
  return rep;
}

InequalityReport ricci_local_first_check(const CheckInput& in, double tol) {
  auto rep = blank_report(in, "ricci_local_pair_first", tol);
  const double n = in.field.model.n;
  const double rho = in.req.rho;
  const double denom = sq(4.0 - kPi);
  const double k = ricci_upper(in.field.model, rep.theorem);
  const double geom = 4.0 * kPi * kPi * (n + 7.0) / (denom * rho * rho);
  const double curv = 8.0 * k * kPi / denom;
  const double sup_u = sup_norm(in.field, Region::ball(in.req.center, rho));
  rep.constants["ric_bound"] = k;
  rep.constants["geom_term"] = geom;
  rep.constants["curvature_term"] = curv;
  rep.constants["sup_u_ball"] = sup_u;
  auto in_half = ball_keeper(in, 0.5 * rho);
  fill(
      rep, in,
      [&](int j, int s) {
        const double u = in.field.at(j, s);
        return in.grad_sq.at(j, s) / (u * u);
      },
      [&](int j, int s, double t) {
        return 2.0 * (1.0 / t + geom + curv) *
               (4.0 + std::log(sup_u / in.field.at(j, s)));
      },
      [&](int j, int s) { return in.grad_sq.ok(j, s) && in_half(j, s); });
  return rep;
}

InequalityReport ricci_local_second_check(const CheckInput& in, double tol) {
  auto rep = blank_report(in, "ricci_local_pair_second", tol);
  const double n = in.field.model.n;
  const double alpha = in.req.alpha;
  const double rho = in.req.rho;
  const double denom = sq(4.0 - kPi);
  const double k = ricci_upper(in.field.model, rep.theorem);
  const double a2 = alpha * alpha;
  const double geom = 8.0 * a2 * n * kPi * kPi *
                      (n * (1.0 + a2 / (alpha - 1.0)) + 3.0) /
                      (denom * rho * rho);
  const double curv =
      sq((4.0 + kPi) / (4.0 - kPi)) * a2 * k * n + a2 * alpha * k * n / (alpha - 1.0);
  rep.constants["ric_bound"] = k;
  rep.constants["alpha"] = alpha;
  rep.constants["geom_term"] = geom;
  rep.constants["curvature_term"] = curv;
  auto in_half = ball_keeper(in, 0.5 * rho);
  fill(
      rep, in,
      [&](int j, int s) {
        const double u = in.field.at(j, s);
        return in.grad_sq.at(j, s) / (u * u) - alpha * in.lap.at(j, s) / u;
      },
      [&](int, int, double t) { return 2.0 * a2 * n / t + geom + curv; },
      [&](int j, int s) {
        return in.grad_sq.ok(j, s) && in.lap.ok(j, s) && in_half(j, s);
      });
  return rep;
}

}  // namespace

const std::vector<std::string>& known_theorems() { return kTheorems; }

double grad_ratio_sup(const ScalarField& field, const Region& region) {
  QuantityField g2 = differentiate(field, "grad_sq");
  const GridSpec& grid = field.grid;
  const double dt_half = 0.5 * grid.dt();
  std::vector<std::vector<double>> pts(grid.spatial_size());
  for (int s = 0; s < grid.spatial_size(); ++s) pts[s] = grid.point(s);
  double best = -std::numeric_limits<double>::infinity();
  long count = 0;
  for (int j = 0; j < grid.nt; ++j) {
    const double t = grid.time(j);
    for (int s = 0; s < grid.spatial_size(); ++s) {
      if (!g2.ok(j, s)) continue;
      if (!region_contains(field.model, region, pts[s], t, dt_half)) continue;
      best = std::max(best, std::sqrt(g2.at(j, s)) / field.at(j, s));
      ++count;
    }
  }
  if (count == 0) throw DomainError("grad ratio sup: empty selection");
  return best;
}

std::vector<InequalityReport> run_check(const ScalarField& field,
                                        const CheckRequest& request,
                                        const BoundSet& bounds, double tolerance) {
  const std::string& name = request.theorem;
  if (std::find(kTheorems.begin(), kTheorems.end(), name) == kTheorems.end())
    throw ConfigError("unknown check '" + name + "'");

  const bool hamilton_family =
      name == "hamilton_global" || name == "hamilton_local" ||
      name == "hamilton_local_general";
  const bool needs_ball = name != "hamilton_global" && name != "liyau_global" &&
                          name != "ricci_compact";
  const bool needs_alpha = name == "liyau_local" || name == "liyau_local_general" ||
                           name == "liyau_global" || name == "ricci_local_pair";

  if (needs_ball) require_ball(request, field.model);
  if (needs_alpha) require_alpha(request);

  CheckInput in = make_input(field, request, bounds, !hamilton_family);

  std::vector<InequalityReport> out;
  if (name == "hamilton_global") {
    out.push_back(hamilton_global_check(in, tolerance));
  } else if (name == "hamilton_local") {
    out.push_back(hamilton_local_check(in, tolerance));
  } else if (name == "hamilton_local_general") {
    out.push_back(hamilton_local_general_check(in, tolerance));
  } else if (name == "liyau_local") {
    out.push_back(liyau_local_check(in, tolerance));
  } else if (name == "liyau_local_general") {
    out.push_back(liyau_local_general_check(in, tolerance));
  } else if (name == "liyau_global") {
    out.push_back(liyau_global_check(in, tolerance));
  } else if (name == "liyau_lower_order_local") {
    out.push_back(liyau_lower_order_local_check(in, tolerance));
  } else if (name == "liyau_lower_order_general") {
    out.push_back(liyau_lower_order_general_check(in, tolerance));
  } else if (name == "ricci_compact") {
    out.push_back(ricci_compact_check(in, tolerance));
  } else {
    out.push_back(ricci_local_first_check(in, tolerance));
    out.push_back(ricci_local_second_check(in, tolerance));
  }
  return out;
}

}  // namespace gradlab
