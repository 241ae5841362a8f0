// End-to-end acceptance run.  Each criterion prints exactly one verdict line;
// the process exits nonzero when any criterion fails.  Everything runs
// in-process against the library so the numbers match the shipped tools.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gradlab/calculus.hpp"
#include "gradlab/config.hpp"
#include "gradlab/drift.hpp"
#include "gradlab/inequality.hpp"
#include "gradlab/montecarlo.hpp"
#include "gradlab/runner.hpp"
#include "gradlab/solve.hpp"
#include "gradlab/tolerances.hpp"

using namespace gradlab;
namespace fs = std::filesystem;

namespace {

using Fails = std::vector<std::string>;

constexpr double kPi = std::numbers::pi;
const std::vector<int> kModeOne{1};
const std::vector<int> kModePair{1, 1};

EvolvingModel circle_model() {
  return EvolvingModel::conformal_circle({1.0, 0.0, 1.0}, 1.0);
}

ScalarField circle_field(int nx = 128, int nt = 201) {
  const EvolvingModel m = circle_model();
  return closed_form_solution(m, default_grid(m, nx, nt), kModeOne, 0.5);
}

ScalarField sphere_field() {
  const EvolvingModel m = EvolvingModel::shrinking_sphere(2, 1.0, 0.5);
  return closed_form_solution(m, default_grid(m, 128, 201, 0.05), kModeOne, 0.3);
}

ScalarField osc_torus_field() {
  const EvolvingModel m = EvolvingModel::conformal_torus(2, {1.0, 0.25, 1.0}, 1.0);
  return closed_form_solution(m, default_grid(m, 48, 81), kModePair, 0.3);
}

ScalarField hyperbolic_field() {
  const EvolvingModel m = EvolvingModel::static_hyperbolic(2, 1.0, 2.0, 1.0);
  InitialProfile init;
  init.type = "gaussian";
  init.eps = 0.4;
  init.width = 0.5;
  return solve_heat(m, default_grid(m, 128, 201), init);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void expect(Fails& fails, bool ok, const std::string& what) {
  if (!ok) fails.push_back(what);
}

InequalityReport single_check(const ScalarField& u, const CheckRequest& req) {
  const BoundSet bounds = extract_bounds(u.model, Region::global());
  const double tol = check_tolerance(u.model, u.grid);
  return run_check(u, req, bounds, tol).at(0);
}

void expect_clean(Fails& fails, const ScalarField& u, const CheckRequest& req) {
  const InequalityReport rep = single_check(u, req);
  expect(fails, rep.masked_count > 0, req.theorem + ": empty mask");
  expect(fails, rep.violations == 0,
         req.theorem + ": " + std::to_string(rep.violations) +
             " violation(s), min slack " + fmt(rep.min_slack));
}

// criterion 1: identity residuals vanish at second order on the circle
void identity_contraction(Fails& fails) {
  const EvolvingModel m = circle_model();
  const int nxs[3] = {32, 64, 128};
  const int nts[3] = {41, 81, 161};
  double ent[3], qev[3];
  for (int i = 0; i < 3; ++i) {
    const GridSpec grid = default_grid(m, nxs[i], nts[i]);
    const ScalarField u = closed_form_solution(m, grid, kModeOne, 0.5);
    const IdentityResiduals ir = identity_residuals(u);
    ent[i] = field_stats(ir.entropy).sup_abs;
    qev[i] = field_stats(ir.q_evolution).sup_abs;
    const double tol = check_tolerance(m, grid);
    expect(fails, ent[i] <= tol,
           "entropy residual " + fmt(ent[i]) + " above " + fmt(tol));
    expect(fails, qev[i] <= tol,
           "evolution residual " + fmt(qev[i]) + " above " + fmt(tol));
  }
  for (int i = 0; i < 2; ++i) {
    const double re = ent[i] / ent[i + 1];
    const double rq = qev[i] / qev[i + 1];
    expect(fails, re >= 3.5 && re <= 4.5, "entropy ratio " + fmt(re));
    expect(fails, rq >= 3.5 && rq <= 4.5, "evolution ratio " + fmt(rq));
  }
}

// criterion 2: compact curvature-flow bound with the exact horizon constant
void compact_flow_bound(Fails& fails) {
  const ScalarField u = sphere_field();
  const InequalityReport rep = single_check(u, {.theorem = "ricci_compact"});
  expect(fails, rep.masked_count > 0, "empty mask");
  expect(fails, rep.violations == 0,
         std::to_string(rep.violations) + " violation(s)");
  for (int j = 0; j < rep.grid.nt; ++j) {
    bool row_masked = false;
    for (int s = 0; s < rep.grid.spatial_size() && !row_masked; ++s)
      row_masked = rep.mask[rep.grid.node(j, s)] != 0;
    if (row_masked && rep.grid.time(j) < 0.05)
      expect(fails, false, "mask dips below t = 0.05");
  }
  const double rhs_T = rep.constants.at("rhs_at_horizon");
  expect(fails, rhs_T == 12.0, "horizon constant " + fmt(rhs_T) + " != 12");
}

// criterion 3: global gradient bounds, flat window and constant curvature
void global_bounds(Fails& fails) {
  const InequalityReport flat =
      single_check(circle_field(), {.theorem = "hamilton_global"});
  expect(fails, flat.violations == 0,
         "circle: " + std::to_string(flat.violations) + " violation(s)");
  expect(fails, flat.constants.at("k") == 0.0, "circle k not zero");
  expect(fails, flat.constants.at("coef_at_horizon") == 2.0,
         "circle horizon coefficient " + fmt(flat.constants.at("coef_at_horizon")));

  const ScalarField uh = hyperbolic_field();
  const InequalityReport curved =
      single_check(uh, {.theorem = "hamilton_global"});
  expect(fails, curved.violations == 0,
         "hyperbolic: " + std::to_string(curved.violations) + " violation(s)");
  expect(fails, std::abs(curved.constants.at("k") - 1.0) <= 1e-12,
         "hyperbolic k " + fmt(curved.constants.at("k")));

  FunctionalSpec spec;
  spec.kind = FunctionalKind::HamiltonH;
  spec.bounds = extract_bounds(uh.model, Region::global());
  spec.horizon = 1.0;
  const HProfile prof = h_profile(spec);
  const double want = (1.0 - std::exp(-1.0)) / 2.0;
  expect(fails, std::abs(prof.h(1.0) - want) <= 1e-12 * want,
         "coefficient profile h(1) = " + fmt(prof.h(1.0)));
}

// criterion 4: heat-operator drift of every functional stays nonpositive
void drift_signs(Fails& fails) {
  const auto run_drift = [&fails](const ScalarField& u, FunctionalKind kind,
                                  double alpha, bool check_identity) {
    FunctionalSpec spec;
    spec.kind = kind;
    spec.alpha = alpha;
    spec.bounds = extract_bounds(u.model, Region::global());
    spec.horizon = u.grid.t1;
    if (kind == FunctionalKind::RicciSHat)
      spec.ric_upper = ricci_upper_bound(u.model);
    const HProfile prof = h_profile(spec);
    if (check_identity) {
      const double relerr = h_identity_max_relerr(spec, prof);
      expect(fails, relerr <= 1e-9,
             to_string(kind) + ": coefficient identity off by " + fmt(relerr));
    }
    const double tol = drift_tolerance(u.model, u.grid);
    const DriftReport rep = drift_field(spec, u, prof, tol);
    expect(fails, rep.pass,
           to_string(kind) + " on " + to_string(u.model.kind) +
               ": masked sup " + fmt(rep.masked_sup) + " above " + fmt(tol));
  };

  run_drift(circle_field(), FunctionalKind::HamiltonH, 2.0, true);
  run_drift(hyperbolic_field(), FunctionalKind::HamiltonH, 2.0, true);
  run_drift(osc_torus_field(), FunctionalKind::LiYauSTilde, 2.0, false);
  run_drift(sphere_field(), FunctionalKind::RicciSHat, 2.0, false);
}

// criterion 5: cutoff constants against their closed-form bounds
void cutoff_constants(Fails& fails) {
  const auto run_cutoff = [&fails](const EvolvingModel& m, const GridSpec& grid,
                                   std::vector<double> center) {
    const std::string tag = to_string(m.kind);
    const CutoffProfile prof =
        build_cutoff(m, grid, std::move(center), 1.0, CutoffShape::Cosine);
    const BoundSet bounds = extract_bounds(m, Region::global());
    const double tol = check_tolerance(m, grid);

    const CPhiReport cp = c_phi(prof, CPhiVariant::Hamilton3, bounds);
    expect(fails, cp.numeric_sup <= cp.analytic_bound + tol,
           tag + ": cutoff constant " + fmt(cp.numeric_sup) + " above " +
               fmt(cp.analytic_bound));

    const PhiFloorReport fl = phi_floor_check(prof);
    expect(fails, fl.violations == 0,
           tag + ": " + std::to_string(fl.violations) + " floor violation(s)");

    const GradPhiReport gp = grad_phi_bound_check(prof);
    expect(fails, gp.numeric_sup <= gp.analytic_bound + tol,
           tag + ": cutoff gradient " + fmt(gp.numeric_sup) + " above " +
               fmt(gp.analytic_bound));
  };

  const EvolvingModel torus =
      EvolvingModel::conformal_torus(2, {1.0, 0.0, 1.0}, 1.0);
  run_cutoff(torus, default_grid(torus, 48, 81), {kPi, kPi});

  const EvolvingModel sphere = EvolvingModel::shrinking_sphere(2, 1.0, 0.5);
  run_cutoff(sphere, default_grid(sphere, 128, 201, 0.05), {0.0, 0.0});
}

// criterion 6: localized bounds on the moving torus and the sphere
void local_bounds(Fails& fails) {
  const ScalarField torus = osc_torus_field();
  expect_clean(fails, torus,
               {.theorem = "hamilton_local", .rho = 1.0, .center = {kPi, kPi}});
  expect_clean(fails, torus,
               {.theorem = "liyau_local", .alpha = 2.0, .rho = 1.0,
                .center = {kPi, kPi}});
  expect_clean(fails, torus,
               {.theorem = "liyau_lower_order_local", .rho = 1.0,
                .center = {kPi, kPi}});

  const ScalarField sphere = sphere_field();
  expect_clean(fails, sphere,
               {.theorem = "hamilton_local", .rho = 1.0, .center = {0.0, 0.0}});
  expect_clean(fails, sphere,
               {.theorem = "liyau_local", .alpha = 2.0, .rho = 1.0,
                .center = {0.0, 0.0}});
  expect_clean(fails, sphere,
               {.theorem = "liyau_lower_order_local", .rho = 1.0,
                .center = {0.0, 0.0}});

  const BoundSet bounds = extract_bounds(sphere.model, Region::global());
  const double tol = check_tolerance(sphere.model, sphere.grid);
  const auto pair = run_check(sphere,
                              {.theorem = "ricci_local_pair", .alpha = 2.0,
                               .rho = 1.0, .center = {0.0, 0.0}},
                              bounds, tol);
  expect(fails, pair.size() == 2, "pair check did not yield two bounds");
  for (const InequalityReport& rep : pair)
    expect(fails, rep.violations == 0,
           rep.theorem + ": " + std::to_string(rep.violations) +
               " violation(s)");
}

// criterion 7: sampled paths reproduce the semigroup and the monotone means
void path_ensembles(Fails& fails) {
  const EvolvingModel circle = circle_model();
  McConfig cfg;
  cfg.t_star = 1.0;
  cfg.x0 = {0.0};
  cfg.n_paths = 10000;
  cfg.dr = 1e-3;
  cfg.checkpoints = {0.25, 0.5, 0.75, 1.0};
  cfg.seed = 42;
  const PathEnsemble pe = simulate_paths(circle, cfg);
  const double ref = mc_reference(circle, McObservable::FirstMode, cfg);
  expect(fails, std::abs(ref - std::exp(-0.5)) <= 1e-13, "reference drifted");
  const WeakErrorReport we = weak_error(pe, McObservable::FirstMode, ref);
  expect(fails, we.pass,
         "weak error |" + fmt(we.mean) + " - " + fmt(ref) + "| above " +
             fmt(we.allowance));

  const ScalarField uc = circle_field();
  FunctionalSpec hspec;
  hspec.kind = FunctionalKind::HamiltonH;
  hspec.bounds = extract_bounds(circle, Region::global());
  hspec.horizon = cfg.t_star;
  const SupermartingaleReport hsm = supermartingale_test(pe, hspec, uc);
  expect(fails, hsm.pass,
         "forward functional means dip: margin " + fmt(hsm.worst_margin));

  const ScalarField us = sphere_field();
  McConfig scfg;
  scfg.t_star = 0.4;
  scfg.x0 = {kPi / 3.0, 0.0};
  scfg.n_paths = 10000;
  scfg.dr = 5e-4;
  scfg.checkpoints = {0.1, 0.2, 0.3, 0.4};
  scfg.seed = 42;
  const PathEnsemble se = simulate_paths(us.model, scfg);
  expect(fails, !se.band_flag, "polar band crowding");
  FunctionalSpec sspec;
  sspec.kind = FunctionalKind::RicciSHat;
  sspec.bounds = extract_bounds(us.model, Region::global());
  sspec.ric_upper = ricci_upper_bound(us.model);
  sspec.horizon = scfg.t_star;
  const SupermartingaleReport ssm = supermartingale_test(se, sspec, us);
  expect(fails, ssm.pass,
         "curvature functional means dip: margin " + fmt(ssm.worst_margin));
}

// criterion 8: one config, one seed, one byte stream
void deterministic_reports(Fails& fails) {
  ordered_json j;
  j["model"] = {{"kind", "conformal_circle"},
                {"T", 1.0},
                {"params", {{"base", 1.0}, {"amp", 0.0}, {"omega", 1.0}}}};
  j["grid"] = {{"nx", 64}, {"nt", 81}};
  j["solution"] = {{"kind", "closed_form"}, {"modes", {1}}, {"eps", 0.5}};
  j["checks"] = ordered_json::array({{{"theorem", "hamilton_global"}}});
  j["drift"] = ordered_json::array({{{"kind", "hamilton_h"}}});
  j["mc"] = {{"t_star", 1.0},
             {"x0", {0.0}},
             {"n_paths", 2000},
             {"dr", 0.002},
             {"checkpoints", {0.25, 0.5, 1.0}},
             {"seed", 42},
             {"observables", {"one", "first_mode"}},
             {"supermartingale", "hamilton_h"}};
  const fs::path dir =
      fs::temp_directory_path() / "gradlab_acceptance" / "determinism";
  j["output"] = {{"dir", dir.string()}, {"formats", {"json"}}};
  const RunConfig cfg = parse_config(j);

  const auto render = [&cfg, &dir]() {
    const LabResult lab = run_lab(cfg);
    write_outputs(cfg, lab);
    std::ifstream in(dir / "report.json", std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };

  const std::string first = render();
  const std::string second = render();
  expect(fails, !first.empty(), "empty report");
  expect(fails, first == second, "reports differ between identical runs");
}

struct Criterion {
  int id;
  const char* label;
  double budget_s;  // 0 = untimed
  std::function<void(Fails&)> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "identity residuals contract at second order", 10.0,
       identity_contraction},
      {2, "compact flow bound holds with exact horizon constant", 30.0,
       compact_flow_bound},
      {3, "global gradient bounds hold on flat and curved models", 0.0,
       global_bounds},
      {4, "functional drifts stay within tolerance", 0.0, drift_signs},
      {5, "cutoff constants meet their analytic bounds", 0.0,
       cutoff_constants},
      {6, "localized bounds hold with zero violations", 120.0, local_bounds},
      {7, "path ensembles match the semigroup and stay monotone", 120.0,
       path_ensembles},
      {8, "identical configs produce byte-identical reports", 0.0,
       deterministic_reports},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    Fails fails;
    const auto tick = std::chrono::steady_clock::now();
    try {
      c.body(fails);
    } catch (const std::exception& e) {
      fails.push_back(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - tick)
            .count();
    if (c.budget_s > 0.0 && secs > c.budget_s)
      fails.push_back("exceeded " + fmt(c.budget_s) + "s budget");
    std::string detail;
    for (const std::string& f : fails) detail += (detail.empty() ? "" : "; ") + f;
    std::printf("criterion %d: %s (%.2fs) %s%s%s\n", c.id,
                fails.empty() ? "PASS" : "FAIL", secs, c.label,
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!fails.empty()) ++failed;
  }
  if (failed > 0) std::printf("%d of 8 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
