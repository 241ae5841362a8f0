#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gradlab/common.hpp"
#include "gradlab/montecarlo.hpp"
#include "gradlab/solve.hpp"

using namespace gradlab;

namespace {

constexpr double kPi = std::numbers::pi;

McConfig small_config(double t_star = 0.5) {
  McConfig cfg;
  cfg.t_star = t_star;
  cfg.x0 = {0.0};
  cfg.n_paths = 400;
  cfg.dr = 0.002;
  cfg.checkpoints = {t_star / 2.0, t_star};
  cfg.seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("ensembles are a pure function of config and model") {
  const EvolvingModel m = EvolvingModel::conformal_circle({1.0, 0.0, 1.0}, 1.0);
  const PathEnsemble a = simulate_paths(m, small_config());
  const PathEnsemble b = simulate_paths(m, small_config());
  REQUIRE(a.positions.size() == b.positions.size());
  for (std::size_t i = 0; i < a.positions.size(); ++i)
    CHECK(a.positions[i] == b.positions[i]);

  McConfig other = small_config();
  other.seed = 8;
  const PathEnsemble c = simulate_paths(m, other);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.positions.size() && !any_diff; ++i)
    any_diff = a.positions[i] != c.positions[i];
  CHECK(any_diff);
}

TEST_CASE("path storage dimensions follow the model chart") {
  const EvolvingModel circle = EvolvingModel::conformal_circle({1.0, 0.0, 1.0}, 1.0);
  CHECK(simulate_paths(circle, small_config()).coord_dim == 1);

  McConfig scfg = small_config(0.3);
  scfg.x0 = {1.2, 0.5};
  const EvolvingModel sphere = EvolvingModel::shrinking_sphere(2, 1.0, 0.5);
  const PathEnsemble se = simulate_paths(sphere, scfg);
  CHECK(se.coord_dim == 3);  // embedded unit vectors
  for (long p = 0; p < scfg.n_paths; ++p) {
    double norm = 0.0;
    for (int d = 0; d < 3; ++d) norm += sq(se.at(1, p, d));
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
  }

  McConfig hcfg = small_config(0.3);
  hcfg.x0 = {0.8, 0.0};
  const EvolvingModel hyp = EvolvingModel::static_hyperbolic(2, 1.0, 2.0, 1.0);
  const PathEnsemble he = simulate_paths(hyp, hcfg);
  CHECK(he.coord_dim == 1);  // radial coordinate only
  for (long p = 0; p < hcfg.n_paths; ++p) {
    CHECK(he.at(1, p, 0) >= 0.0);
    CHECK(he.at(1, p, 0) <= 2.0);
  }
}

TEST_CASE("config validation rejects malformed requests") {
  const EvolvingModel m = EvolvingModel::conformal_circle({1.0, 0.0, 1.0}, 1.0);
  McConfig cfg = small_config();
  cfg.t_star = 1.5;  // beyond the model window
  CHECK_THROWS_AS(simulate_paths(m, cfg), ConfigError);

  cfg = small_config();
  cfg.checkpoints = {0.4, 0.2};
  CHECK_THROWS_AS(simulate_paths(m, cfg), ConfigError);

  cfg = small_config();
  cfg.checkpoints = {0.25, 0.6};  // past t_star
  CHECK_THROWS_AS(simulate_paths(m, cfg), ConfigError);

  cfg = small_config();
  cfg.x0 = {0.0, 0.0};
  CHECK_THROWS_AS(simulate_paths(m, cfg), ConfigError);
}

TEST_CASE("trivial observable has mean one with zero spread") {
  const EvolvingModel m = EvolvingModel::conformal_circle({1.0, 0.0, 1.0}, 1.0);
  const PathEnsemble e = simulate_paths(m, small_config());
  CHECK(mc_reference(m, McObservable::One, small_config()) == 1.0);
  const WeakErrorReport we = weak_error(e, McObservable::One, 1.0);
  CHECK(we.mean == 1.0);
  CHECK(we.std_error == 0.0);
  CHECK(we.pass);
}

TEST_CASE("first-mode reference values are the closed forms") {
  const EvolvingModel circle = EvolvingModel::conformal_circle({1.0, 0.0, 1.0}, 1.0);
  McConfig cfg = small_config(1.0);
  cfg.checkpoints = {1.0};
  CHECK(mc_reference(circle, McObservable::FirstMode, cfg) ==
        doctest::Approx(std::exp(-0.5)).epsilon(1e-13));

  McConfig off = cfg;
  off.x0 = {kPi / 3.0};
  CHECK(mc_reference(circle, McObservable::FirstMode, off) ==
        doctest::Approx(0.5 * std::exp(-0.5)).epsilon(1e-13));

  const EvolvingModel sphere = EvolvingModel::shrinking_sphere(2, 1.0, 0.5);
  McConfig scfg;
  scfg.t_star = 0.4;
  scfg.x0 = {kPi / 3.0, 0.0};
  scfg.checkpoints = {0.4};
  // eigenfunction cos(theta), decay factor c(t*) = 0.6
  CHECK(mc_reference(sphere, McObservable::FirstMode, scfg) ==
        doctest::Approx(0.3).epsilon(1e-13));
}

TEST_CASE("weak error closes at moderate ensemble size") {
  const EvolvingModel m = EvolvingModel::conformal_circle({1.0, 0.0, 1.0}, 1.0);
  McConfig cfg;
  cfg.t_star = 1.0;
  cfg.x0 = {0.0};
  cfg.n_paths = 4000;
  cfg.dr = 0.002;
  cfg.checkpoints = {1.0};
  cfg.seed = 42;
  const PathEnsemble e = simulate_paths(m, cfg);
  const double ref = mc_reference(m, McObservable::FirstMode, cfg);
  const WeakErrorReport we = weak_error(e, McObservable::FirstMode, ref);
  CHECK(we.pass);
  CHECK(we.n_paths == 4000);
  CHECK(we.allowance == doctest::Approx(3.0 * we.std_error + cfg.dr).epsilon(1e-13));
  CHECK(std::abs(we.mean - ref) <= we.allowance);
}

TEST_CASE("weak error requires the final checkpoint at the target time") {
  const EvolvingModel m = EvolvingModel::conformal_circle({1.0, 0.0, 1.0}, 1.0);
  McConfig cfg = small_config(0.5);
  cfg.checkpoints = {0.25};  // stops short of t_star
  const PathEnsemble e = simulate_paths(m, cfg);
  CHECK_THROWS_AS(weak_error(e, McObservable::One, 1.0), ConfigError);
}

TEST_CASE("ensemble means of the forward functional grow along checkpoints") {
  const EvolvingModel m = EvolvingModel::conformal_circle({1.0, 0.0, 1.0}, 1.0);
  const std::vector<int> modes{1};
  const ScalarField u =
      closed_form_solution(m, default_grid(m, 128, 201), modes, 0.5);

  McConfig cfg;
  cfg.t_star = 1.0;
  cfg.x0 = {0.0};
  cfg.n_paths = 2000;
  cfg.dr = 0.002;
  cfg.checkpoints = {0.25, 0.5, 0.75, 1.0};
  cfg.seed = 11;
  const PathEnsemble e = simulate_paths(m, cfg);

  FunctionalSpec spec;
  spec.kind = FunctionalKind::HamiltonH;
  spec.horizon = cfg.t_star;
  spec.bounds = extract_bounds(m, Region::global());
  const SupermartingaleReport sm = supermartingale_test(e, spec, u);
  CHECK(sm.pass);
  // the r = 1 checkpoint sits at heat time zero, below the mask floor
  CHECK(sm.stats.size() == 3);
  for (std::size_t i = 0; i + 1 < sm.stats.size(); ++i)
    CHECK(sm.stats[i].r < sm.stats[i + 1].r);
  CHECK(sm.worst_margin >= 0.0);
}

TEST_CASE("supermartingale test needs two usable checkpoints") {
  const EvolvingModel m = EvolvingModel::conformal_circle({1.0, 0.0, 1.0}, 1.0);
  const std::vector<int> modes{1};
  const ScalarField u =
      closed_form_solution(m, default_grid(m, 64, 101), modes, 0.5);
  McConfig cfg = small_config(1.0);
  cfg.checkpoints = {0.999, 1.0};  // both land below the heat-time floor
  const PathEnsemble e = simulate_paths(m, cfg);
  FunctionalSpec spec;
  spec.kind = FunctionalKind::HamiltonH;
  spec.horizon = cfg.t_star;
  spec.bounds = extract_bounds(m, Region::global());
  CHECK_THROWS_AS(supermartingale_test(e, spec, u), ConfigError);
}

TEST_CASE("polar band bookkeeping flags only real crowding") {
  const EvolvingModel sphere = EvolvingModel::shrinking_sphere(2, 1.0, 0.5);
  McConfig cfg;
  cfg.t_star = 0.4;
  cfg.x0 = {kPi / 3.0, 0.0};
  cfg.n_paths = 400;
  cfg.dr = 0.001;
  cfg.checkpoints = {0.4};
  cfg.seed = 3;
  const PathEnsemble e = simulate_paths(sphere, cfg);
  CHECK(e.total_steps == 400 * 400);
  CHECK_FALSE(e.band_flag);  // start 60 degrees from the pole
}
