#include "gradlab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gradlab/common.hpp"
#include "gradlab/solve.hpp"

namespace gradlab {
namespace {

constexpr double kPi = std::numbers::pi;

// Box-Muller over SplitMix64 with spare caching; exactly two uniforms per
// pair of normals keeps streams reproducible across call patterns.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = rng_.uniform01();
    const double u2 = rng_.uniform01();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * kPi * u2);
    has_spare_ = true;
    return mag * std::cos(2.0 * kPi * u2);
  }

 private:
  SplitMix64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

int coord_dim_for(const EvolvingModel& model) {
  switch (model.kind) {
    case ModelKind::ShrinkingSphere:
      return model.n + 1;
    case ModelKind::StaticHyperbolic:
      return 1;
    default:
      return model.n;
  }
}

struct Schedule {
  std::vector<double> knots;  // 0 followed by the checkpoints
  std::vector<int> substeps;  // equal substeps per span, each <= nominal dr
};

Schedule build_schedule(const McConfig& cfg) {
  Schedule sch;
  sch.knots.push_back(0.0);
  sch.knots.insert(sch.knots.end(), cfg.checkpoints.begin(), cfg.checkpoints.end());
  for (std::size_t i = 0; i + 1 < sch.knots.size(); ++i) {
    const double span = sch.knots[i + 1] - sch.knots[i];
    sch.substeps.push_back(
        std::max(1, static_cast<int>(std::ceil(span / cfg.dr - 1e-9))));
  }
  return sch;
}

void validate(const EvolvingModel& model, const McConfig& cfg) {
  if (!(cfg.t_star > 0.0) || cfg.t_star > model.horizon + 1e-12)
    throw ConfigError("mc: t_star must lie in (0, horizon]");
  if (cfg.n_paths < 2) throw ConfigError("mc: need at least 2 paths");
  if (!(cfg.dr > 0.0)) throw ConfigError("mc: dr must be positive");
  if (cfg.checkpoints.empty()) throw ConfigError("mc: need at least one checkpoint");
  double prev = 0.0;
  for (double r : cfg.checkpoints) {
    if (!(r > prev)) throw ConfigError("mc: checkpoints must ascend from 0");
    prev = r;
  }
  if (prev > cfg.t_star + 1e-12)
    throw ConfigError("mc: checkpoints must stay within (0, t_star]");
  if (static_cast<int>(cfg.x0.size()) != model.n)
    throw ConfigError("mc: x0 needs " + std::to_string(model.n) +
                      " chart coordinates");
  model.require_chart(cfg.x0);
}

struct PathCounters {
  long steps = 0;
  long band_hits = 0;
};

void run_path(const EvolvingModel& model, const McConfig& cfg, const Schedule& sch,
              long path, PathEnsemble& out, PathCounters& counters) {
  GaussianStream gauss(mix64(cfg.seed ^ mix64(static_cast<std::uint64_t>(path) + 1)));
  const int dim = out.coord_dim;

  std::vector<double> pos;
  switch (model.kind) {
    case ModelKind::ShrinkingSphere:
      pos = sphere_embed(cfg.x0);
      break;
    case ModelKind::StaticHyperbolic:
      pos = {cfg.x0[0]};
      break;
    default:
      pos.assign(cfg.x0.begin(), cfg.x0.end());
      break;
  }

  std::vector<double> zeta(dim);
  for (std::size_t span = 0; span + 1 < sch.knots.size(); ++span) {
    const int m = sch.substeps[span];
    const double dr = (sch.knots[span + 1] - sch.knots[span]) / m;
    for (int k = 0; k < m; ++k) {
      const double t = cfg.t_star - (sch.knots[span] + k * dr);
      switch (model.kind) {
        case ModelKind::ConformalCircle:
        case ModelKind::ConformalTorus: {
          const double sigma = std::sqrt(dr) / model.scale.value(t);
          for (int d = 0; d < dim; ++d) pos[d] += sigma * gauss.next();
          break;
        }
        case ModelKind::ShrinkingSphere: {
          // unit-sphere motion under the time change dtau = dr / c(t)
          const double dtau = dr / model.sphere_factor(t);
          double dot = 0.0;
          for (int d = 0; d < dim; ++d) {
            zeta[d] = gauss.next();
            dot += zeta[d] * pos[d];
          }
          const double scale = std::sqrt(dtau);
          double norm2 = 0.0;
          for (int d = 0; d < dim; ++d) {
            pos[d] += scale * (zeta[d] - dot * pos[d]);
            norm2 += pos[d] * pos[d];
          }
          const double inv = 1.0 / std::sqrt(norm2);
          for (int d = 0; d < dim; ++d) pos[d] *= inv;
          const double theta = std::acos(std::clamp(pos[0], -1.0, 1.0));
          if (std::min(theta, kPi - theta) < model.band) ++counters.band_hits;
          break;
        }
        case ModelKind::StaticHyperbolic: {
          // radial diffusion; the drift is evaluated no closer than one step
          // width to the origin, and both chart ends reflect
          const double rk = std::sqrt(model.kappa);
          const double r_eff = std::max(pos[0], std::sqrt(dr));
          const double drift = 0.5 * (model.n - 1) * rk / std::tanh(rk * r_eff);
          pos[0] += std::sqrt(dr) * gauss.next() + drift * dr;
          if (pos[0] < 0.0) pos[0] = -pos[0];
          if (pos[0] > model.chart_radius) pos[0] = 2.0 * model.chart_radius - pos[0];
          break;
        }
      }
      ++counters.steps;
    }
    const std::size_t base =
        (span * static_cast<std::size_t>(cfg.n_paths) + path) * dim;
    for (int d = 0; d < dim; ++d) out.positions[base + d] = pos[d];
  }
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

// Two-pass pairwise statistics: deterministic for a fixed sample order.
MeanSe mean_se(std::span<const double> xs) {
  const long n = static_cast<long>(xs.size());
  MeanSe out;
  out.mean = pairwise_sum(xs) / n;
  std::vector<double> dev(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) dev[i] = sq(xs[i] - out.mean);
  const double var = pairwise_sum(dev) / (n - 1);
  out.se = std::sqrt(var / n);
  return out;
}

double observe(const PathEnsemble& ens, McObservable obs, int checkpoint, long path) {
  if (obs == McObservable::One) return 1.0;
  switch (ens.model.kind) {
    case ModelKind::ShrinkingSphere:
      return ens.at(checkpoint, path, 0);  // embedded cos(theta)
    case ModelKind::ConformalCircle:
    case ModelKind::ConformalTorus:
      return std::cos(ens.at(checkpoint, path, 0));
    default:
      throw DomainError("no closed-form mode observable on this model");
  }
}

// Chart point for functional interpolation; collapsed axes keep the grid's
// fixed coordinates.
std::vector<double> chart_point(const PathEnsemble& ens, const GridSpec& grid,
                                int checkpoint, long path) {
  const EvolvingModel& model = ens.model;
  switch (model.kind) {
    case ModelKind::ShrinkingSphere: {
      std::vector<double> p(ens.coord_dim);
      for (int d = 0; d < ens.coord_dim; ++d) p[d] = ens.at(checkpoint, path, d);
      return sphere_angles(p);
    }
    case ModelKind::StaticHyperbolic: {
      std::vector<double> x = grid.point(0);
      x[0] = ens.at(checkpoint, path, 0);
      return x;
    }
    default: {
      std::vector<double> x(model.n);
      for (int d = 0; d < model.n; ++d) x[d] = ens.at(checkpoint, path, d);
      return x;
    }
  }
}

}  // namespace

PathEnsemble simulate_paths(const EvolvingModel& model, const McConfig& config) {
  validate(model, config);
  PathEnsemble ens;
  ens.model = model;
  ens.config = config;
  ens.coord_dim = coord_dim_for(model);
  ens.positions.assign(config.checkpoints.size() *
                           static_cast<std::size_t>(config.n_paths) * ens.coord_dim,
                       0.0);
  const Schedule sch = build_schedule(config);
  PathCounters counters;
  for (long p = 0; p < config.n_paths; ++p)
    run_path(model, config, sch, p, ens, counters);
  ens.total_steps = counters.steps;
  ens.band_entries = counters.band_hits;
  ens.band_flag = counters.band_hits > 0 && counters.band_hits * 100 >= counters.steps;
  return ens;
}

std::string to_string(McObservable obs) {
  return obs == McObservable::One ? "one" : "first_mode";
}

double mc_reference(const EvolvingModel& model, McObservable obs,
                    const McConfig& config) {
  if (obs == McObservable::One) return 1.0;
  std::vector<int> modes;
  if (model.kind == ModelKind::ShrinkingSphere) {
    modes = {1};
  } else {
    modes.assign(model.n, 0);
    modes[0] = 1;
  }
  const double decay = mode_decay(model, modes, config.t_star);
  const double shape = mode_shape(model, modes, config.x0);
  return shape * std::exp(-decay);
}

WeakErrorReport weak_error(const PathEnsemble& ensemble, McObservable obs,
                           double reference, double err_coeff) {
  const McConfig& cfg = ensemble.config;
  const int last = static_cast<int>(cfg.checkpoints.size()) - 1;
  if (std::abs(cfg.checkpoints[last] - cfg.t_star) > 1e-12)
    throw ConfigError("weak error: final checkpoint must sit at t_star");
  std::vector<double> vals(cfg.n_paths);
  for (long p = 0; p < cfg.n_paths; ++p) vals[p] = observe(ensemble, obs, last, p);
  const MeanSe ms = mean_se(vals);

  WeakErrorReport rep;
  rep.observable = to_string(obs);
  rep.mean = ms.mean;
  rep.std_error = ms.se;
  rep.reference = reference;
  rep.n_paths = cfg.n_paths;
  rep.allowance = 3.0 * ms.se + err_coeff * cfg.dr;
  rep.pass = std::abs(ms.mean - reference) <= rep.allowance;
  return rep;
}

SupermartingaleReport supermartingale_test(const PathEnsemble& ensemble,
                                           const FunctionalSpec& spec,
                                           const ScalarField& field) {
  const HProfile prof = h_profile(spec);
  const QuantityField phi = functional_field(spec, field, prof);
  const McConfig& cfg = ensemble.config;
  const double floor = field.grid.mask_floor() - 1e-12;

  std::vector<int> keep;
  for (int c = 0; c < static_cast<int>(cfg.checkpoints.size()); ++c) {
    const double t = cfg.t_star - cfg.checkpoints[c];
    if (t >= floor && t <= field.grid.t1 + 1e-12) keep.push_back(c);
  }
  if (keep.size() < 2)
    throw ConfigError(
        "supermartingale test: need two checkpoints above the mask floor");

  SupermartingaleReport rep;
  rep.kind = to_string(spec.kind);
  std::vector<std::vector<double>> samples(
      keep.size(), std::vector<double>(cfg.n_paths));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const int c = keep[i];
    const double t = cfg.t_star - cfg.checkpoints[c];
    for (long p = 0; p < cfg.n_paths; ++p) {
      const std::vector<double> x = chart_point(ensemble, field.grid, c, p);
      samples[i][p] = interpolate(field.grid, phi.values, x, t);
    }
    const MeanSe ms = mean_se(samples[i]);
    rep.stats.push_back({cfg.checkpoints[c], t, ms.mean, ms.se});
  }

  rep.worst_margin = std::numeric_limits<double>::infinity();
  std::vector<double> diff(cfg.n_paths);
  for (std::size_t i = 0; i + 1 < keep.size(); ++i) {
    for (long p = 0; p < cfg.n_paths; ++p)
      diff[p] = samples[i + 1][p] - samples[i][p];
    const MeanSe ms = mean_se(diff);
    rep.worst_margin = std::min(rep.worst_margin, ms.mean + 3.0 * ms.se);
  }
  rep.pass = rep.worst_margin >= 0.0;
  return rep;
}

}  // namespace gradlab
