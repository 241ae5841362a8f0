// Microbenchmarks for the hot paths: pointwise geometry, stencil sweeps,
// the line solver, check evaluation, and path simulation.  Sizes are chosen
// so one iteration stays in the millisecond range.
#include <benchmark/benchmark.h>

#include <numbers>
#include <vector>

#include "gradlab/calculus.hpp"
#include "gradlab/drift.hpp"
#include "gradlab/inequality.hpp"
#include "gradlab/montecarlo.hpp"
#include "gradlab/solve.hpp"
#include "gradlab/tolerances.hpp"

using namespace gradlab;

namespace {

constexpr double kPi = std::numbers::pi;
const std::vector<int> kModeOne{1};
const std::vector<int> kModePair{1, 1};

ScalarField circle_field(int nx, int nt) {
  const EvolvingModel m = EvolvingModel::conformal_circle({1.0, 0.0, 1.0}, 1.0);
  return closed_form_solution(m, default_grid(m, nx, nt), kModeOne, 0.5);
}

ScalarField torus_field(int nx, int nt) {
  const EvolvingModel m =
      EvolvingModel::conformal_torus(2, {1.0, 0.25, 1.0}, 1.0);
  return closed_form_solution(m, default_grid(m, nx, nt), kModePair, 0.3);
}

void bm_metric_data(benchmark::State& state) {
  const EvolvingModel m = EvolvingModel::shrinking_sphere(2, 1.0, 0.5);
  const std::vector<double> x{1.1, 0.7};
  for (auto _ : state) {
    MetricData md = metric_data(m, x, 0.25);
    benchmark::DoNotOptimize(md);
  }
}
BENCHMARK(bm_metric_data);

void bm_laplacian_sweep(benchmark::State& state) {
  const ScalarField u = torus_field(static_cast<int>(state.range(0)), 33);
  for (auto _ : state) {
    QuantityField lap = differentiate(u, "laplacian");
    benchmark::DoNotOptimize(lap);
  }
}
BENCHMARK(bm_laplacian_sweep)->Arg(24)->Arg(48);

void bm_identity_residuals(benchmark::State& state) {
  const ScalarField u = circle_field(static_cast<int>(state.range(0)), 81);
  for (auto _ : state) {
    IdentityResiduals ir = identity_residuals(u);
    benchmark::DoNotOptimize(ir);
  }
}
BENCHMARK(bm_identity_residuals)->Arg(64)->Arg(128);

void bm_heat_solve(benchmark::State& state) {
  const EvolvingModel m = EvolvingModel::static_hyperbolic(2, 1.0, 2.0, 1.0);
  const GridSpec grid =
      default_grid(m, static_cast<int>(state.range(0)), 101);
  InitialProfile init;
  init.type = "gaussian";
  init.eps = 0.4;
  for (auto _ : state) {
    ScalarField u = solve_heat(m, grid, init);
    benchmark::DoNotOptimize(u);
  }
}
BENCHMARK(bm_heat_solve)->Arg(64)->Arg(128);

void bm_cutoff_constant(benchmark::State& state) {
  const EvolvingModel m =
      EvolvingModel::conformal_torus(2, {1.0, 0.0, 1.0}, 1.0);
  const GridSpec grid = default_grid(m, 48, 41);
  const BoundSet bounds = extract_bounds(m, Region::global());
  for (auto _ : state) {
    CutoffProfile prof = build_cutoff(m, grid, {kPi, kPi}, 1.0);
    CPhiReport rep = c_phi(prof, CPhiVariant::Hamilton3, bounds);
    benchmark::DoNotOptimize(rep);
  }
}
BENCHMARK(bm_cutoff_constant);

void bm_global_check(benchmark::State& state) {
  const ScalarField u = circle_field(128, 161);
  const BoundSet bounds = extract_bounds(u.model, Region::global());
  const double tol = check_tolerance(u.model, u.grid);
  for (auto _ : state) {
    auto reps = run_check(u, {.theorem = "hamilton_global"}, bounds, tol);
    benchmark::DoNotOptimize(reps);
  }
}
BENCHMARK(bm_global_check);

void bm_local_check(benchmark::State& state) {
  const ScalarField u = torus_field(48, 81);
  const BoundSet bounds = extract_bounds(u.model, Region::global());
  const double tol = check_tolerance(u.model, u.grid);
  const CheckRequest req{.theorem = "liyau_local", .alpha = 2.0, .rho = 1.0,
                         .center = {kPi, kPi}};
  for (auto _ : state) {
    auto reps = run_check(u, req, bounds, tol);
    benchmark::DoNotOptimize(reps);
  }
}
BENCHMARK(bm_local_check);

void bm_drift_sweep(benchmark::State& state) {
  const ScalarField u = circle_field(128, 161);
  FunctionalSpec spec;
  spec.kind = FunctionalKind::HamiltonH;
  spec.bounds = extract_bounds(u.model, Region::global());
  spec.horizon = u.grid.t1;
  const HProfile prof = h_profile(spec);
  const double tol = drift_tolerance(u.model, u.grid);
  for (auto _ : state) {
    DriftReport rep = drift_field(spec, u, prof, tol);
    benchmark::DoNotOptimize(rep);
  }
}
BENCHMARK(bm_drift_sweep);

void bm_simulate_paths(benchmark::State& state) {
  const EvolvingModel m = EvolvingModel::conformal_circle({1.0, 0.0, 1.0}, 1.0);
  McConfig cfg;
  cfg.t_star = 0.5;
  cfg.x0 = {0.0};
  cfg.n_paths = state.range(0);
  cfg.dr = 0.002;
  cfg.checkpoints = {0.25, 0.5};
  cfg.seed = 5;
  for (auto _ : state) {
    PathEnsemble pe = simulate_paths(m, cfg);
    benchmark::DoNotOptimize(pe);
  }
  state.SetItemsProcessed(state.iterations() * cfg.n_paths * 250);
}
BENCHMARK(bm_simulate_paths)->Arg(500)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
