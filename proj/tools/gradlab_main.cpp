#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "gradlab/bounds.hpp"
#include "gradlab/calculus.hpp"
#include "gradlab/common.hpp"
#include "gradlab/config.hpp"
#include "gradlab/drift.hpp"
#include "gradlab/inequality.hpp"
#include "gradlab/montecarlo.hpp"
#include "gradlab/runner.hpp"
#include "gradlab/solve.hpp"
#include "gradlab/tolerances.hpp"

namespace {

using namespace gradlab;

void print_constants_row(const std::string& theorem,
                         const std::map<std::string, double>& constants) {
  std::printf("  %-26s", theorem.c_str());
  bool first = true;
  for (const auto& [name, value] : constants) {
    std::printf("%s%s=%.6g", first ? "" : "  ", name.c_str(), value);
    first = false;
  }
  std::printf("\n");
}

int cmd_run(const RunConfig& cfg) {
  const LabResult result = run_lab(cfg);
  write_outputs(cfg, result);
  std::printf("model: %s\n", cfg.model.describe().c_str());
  std::printf("checks: %zu  drift: %zu  cutoff: %zu  mc: %s\n",
              cfg.checks.size(), cfg.drift.size(), cfg.cutoffs.size(),
              cfg.mc ? "yes" : "no");
  for (const auto& line : result.failures)
    std::printf("failure: %s\n", line.c_str());
  if (cfg.output.json)
    std::printf("report: %s/report.json\n", cfg.output.dir.c_str());
  std::printf("status: %s\n", result.pass ? "PASS" : "FAIL");
  return result.pass ? 0 : 1;
}

// Every theorem's right-hand-side ingredients for the configured model,
// with the numeric cutoff sups alongside their analytic bounds.
int cmd_constants(const RunConfig& cfg) {
  const GridSpec grid = build_grid(cfg);
  const ScalarField field = build_solution(cfg, grid);
  const BoundSet bounds = extract_bounds(cfg.model, Region::global());
  const double tol = check_tolerance(cfg.model, grid);

  std::printf("model: %s\n", cfg.model.describe().c_str());
  std::printf("bounds: k_sup=%.6g k1=%.6g k2=%.6g k3=%.6g k4=%.6g\n",
              bounds.k.value, bounds.k1, bounds.k2, bounds.k3, bounds.k4);
  std::printf("constants per check:\n");
  for (const auto& name : known_theorems()) {
    CheckRequest req;
    req.theorem = name;
    req.center.assign(cfg.model.n, 0.0);
    for (const auto& configured : cfg.checks) {
      if (configured.theorem != name) continue;
      req = configured;
      break;
    }
    try {
      for (const auto& rep : run_check(field, req, bounds, tol))
        print_constants_row(rep.theorem, rep.constants);
    } catch (const ConfigError& e) {
      std::printf("  %-26sskipped (%s)\n", name.c_str(), e.what());
    } catch (const DomainError& e) {
      std::printf("  %-26sskipped (%s)\n", name.c_str(), e.what());
    }
  }

  std::vector<double> center(cfg.model.n, 0.0);
  double rho = 1.0, alpha = 2.0;
  if (!cfg.cutoffs.empty()) {
    center = cfg.cutoffs.front().center;
    rho = cfg.cutoffs.front().rho;
    alpha = cfg.cutoffs.front().alpha;
  }
  try {
    const CutoffProfile prof =
        build_cutoff(cfg.model, grid, center, rho, CutoffShape::Cosine);
    std::printf("cutoff sups (rho=%.6g):\n", rho);
    for (const auto variant : {CPhiVariant::Hamilton3, CPhiVariant::Hamilton7,
                               CPhiVariant::LiYauAlpha}) {
      const CPhiReport cp = c_phi(prof, variant, bounds, alpha);
      const char* name = variant == CPhiVariant::Hamilton3    ? "hamilton3"
                         : variant == CPhiVariant::Hamilton7 ? "hamilton7"
                                                             : "liyau_alpha";
      std::printf("  %-12scoef=%.6g  numeric_sup=%.6g  analytic_bound=%.6g\n",
                  name, cp.coefficient, cp.numeric_sup, cp.analytic_bound);
    }
  } catch (const ConfigError& e) {
    std::printf("cutoff sups skipped (%s)\n", e.what());
  } catch (const DomainError& e) {
    std::printf("cutoff sups skipped (%s)\n", e.what());
  }
  return 0;
}

int cmd_identities(const RunConfig& cfg) {
  const GridSpec grid = build_grid(cfg);
  const ScalarField field = build_solution(cfg, grid);
  const BoundSet bounds = extract_bounds(cfg.model, Region::global());
  const double tol = check_tolerance(cfg.model, grid);
  bool ok = true;

  // equalities shrink to zero at second order; one-sided slacks may only
  // dip below zero by stencil error
  const auto sup_line = [&](const char* name, const QuantityField& f) {
    const FieldStats st = field_stats(f);
    const bool pass = st.sup_abs <= tol;
    ok = ok && pass;
    std::printf("  %-28ssup=%.3e  tol=%.3e  %s\n", name, st.sup_abs, tol,
                pass ? "PASS" : "FAIL");
  };
  const auto floor_line = [&](const char* name, const QuantityField& f) {
    const FieldStats st = field_stats(f);
    const bool pass = st.min_value >= -tol;
    ok = ok && pass;
    std::printf("  %-28smin=%.3e  tol=%.3e  %s\n", name, st.min_value, tol,
                pass ? "PASS" : "FAIL");
  };

  std::printf("identity residuals (%s):\n", cfg.model.describe().c_str());
  const IdentityResiduals ids = identity_residuals(field);
  sup_line("entropy", ids.entropy);
  sup_line("q_evolution", ids.q_evolution);
  sup_line("laplacian_variation",
           laplacian_variation_check(cfg.model, field));
  floor_line("hessian_trace_slack", hessian_bound_check(field));
  floor_line("curvature_drift_residual", rt_lower_residual(field, bounds.k));
  std::printf("status: %s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

int cmd_mc(const RunConfig& cfg) {
  if (!cfg.mc) throw ConfigError("config has no mc section");
  const McSection& mc = *cfg.mc;
  const PathEnsemble ensemble = simulate_paths(cfg.model, mc.config);
  bool ok = !ensemble.band_flag;
  std::printf("paths: %ld  steps: %ld  band entries: %ld%s\n",
              mc.config.n_paths, ensemble.total_steps, ensemble.band_entries,
              ensemble.band_flag ? "  (band flag raised)" : "");
  for (const auto obs : mc.observables) {
    const double ref = mc_reference(cfg.model, obs, mc.config);
    const WeakErrorReport we = weak_error(ensemble, obs, ref, mc.err_coeff);
    ok = ok && we.pass;
    std::printf("  weak error %-12smean=%.6f  ref=%.6f  |err|=%.2e  "
                "allow=%.2e  %s\n",
                we.observable.c_str(), we.mean, we.reference,
                std::abs(we.mean - we.reference), we.allowance,
                we.pass ? "PASS" : "FAIL");
  }
  if (mc.supermartingale) {
    const GridSpec grid = build_grid(cfg);
    const ScalarField field = build_solution(cfg, grid);
    const BoundSet bounds = extract_bounds(cfg.model, Region::global());
    FunctionalSpec spec;
    spec.kind = *mc.supermartingale;
    spec.alpha = mc.supermartingale_alpha;
    spec.bounds = bounds;
    spec.ric_upper = spec.kind == FunctionalKind::RicciSHat
                         ? ricci_upper_bound(cfg.model)
                         : 0.0;
    spec.horizon = mc.config.t_star;
    const SupermartingaleReport sm = supermartingale_test(ensemble, spec, field);
    ok = ok && sm.pass;
    for (const auto& s : sm.stats)
      std::printf("  checkpoint r=%.4f t=%.4f  mean=%.6f  se=%.2e\n", s.r, s.t,
                  s.mean, s.std_error);
    std::printf("  supermartingale %-12sworst margin=%.3e  %s\n",
                sm.kind.c_str(), sm.worst_margin, sm.pass ? "PASS" : "FAIL");
  }
  std::printf("status: %s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

int cmd_solve(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  const GridSpec grid = build_grid(cfg);
  const ScalarField field = build_solution(cfg, grid);
  std::printf("model: %s\n", cfg.model.describe().c_str());
  std::printf("solution: %s (%s)  sup=%.6f\n", field.meta.kind.c_str(),
              field.meta.profile.c_str(),
              sup_norm(field, Region::global()));
  if (field.meta.kind == "numeric") {
    const double ratio =
        volume_integral(field, grid.nt - 1) / volume_integral(field, 0);
    std::printf("mass ratio: %.8f (expected %.8f)\n", ratio,
                mass_scale_factor(cfg.model, grid.t1));
    std::printf("max principle violations: %ld\n",
                field.max_principle_violations);
  }

  fs::create_directories(cfg.output.dir);
  if (cfg.output.csv) {
    std::string csv = "t";
    for (const auto& axis : grid.axes) csv += "," + axis.name;
    csv += ",u\n";
    char buf[64];
    for (int j = 0; j < grid.nt; ++j) {
      for (int s = 0; s < grid.spatial_size(); ++s) {
        std::snprintf(buf, sizeof buf, "%.17g", grid.time(j));
        csv += buf;
        for (const double x : grid.point(s)) {
          std::snprintf(buf, sizeof buf, ",%.17g", x);
          csv += buf;
        }
        std::snprintf(buf, sizeof buf, ",%.17g\n", field.at(j, s));
        csv += buf;
      }
    }
    const std::string path = cfg.output.dir + "/u.csv";
    write_text_file(path, csv);
    std::printf("wrote %s\n", path.c_str());
  }
  if (cfg.output.json) {
    ordered_json j;
    j["model"] = config_to_json(cfg)["model"];
    ordered_json axes = ordered_json::array();
    for (const auto& axis : grid.axes) {
      ordered_json aj;
      aj["name"] = axis.name;
      aj["count"] = axis.count;
      aj["lo"] = axis.lo;
      aj["hi"] = axis.hi;
      aj["periodic"] = axis.periodic;
      aj["collapsed"] = axis.collapsed;
      if (axis.collapsed) aj["fixed"] = axis.fixed;
      axes.push_back(aj);
    }
    ordered_json gj;
    gj["axes"] = axes;
    gj["nt"] = grid.nt;
    gj["t1"] = grid.t1;
    j["grid"] = gj;
    j["layout"] = "values[time][spatial], spatial row-major over resolved axes";
    j["values"] = field.values;
    const std::string path = cfg.output.dir + "/field.json";
    write_text_file(path, j.dump() + "\n");
    std::printf("wrote %s\n", path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for gradient bounds under evolving metrics"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string format;
  int refine = 0;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "run configuration (JSON)")
      ->required();
  app.add_option("--out", out_dir, "output directory override");
  app.add_option("--refine", refine, "halve the grid steps N times")
      ->check(CLI::NonNegativeNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Monte Carlo seed override");
  app.add_option("--format", format, "restrict outputs to one format")
      ->check(CLI::IsMember({"json", "csv"}));

  auto* run_cmd = app.add_subcommand("run", "full verification run");
  auto* constants_cmd =
      app.add_subcommand("constants", "print the per-theorem constant table");
  auto* identities_cmd =
      app.add_subcommand("identities", "evolution identity residual suite");
  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo ensemble tests");
  auto* solve_cmd = app.add_subcommand("solve", "solve and export the field");
  for (auto* sub : {run_cmd, constants_cmd, identities_cmd, mc_cmd, solve_cmd})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (!out_dir.empty()) cfg.output.dir = out_dir;
    if (refine > 0) apply_refinement(cfg, refine);
    if (seed_opt->count() > 0 && cfg.mc) cfg.mc->config.seed = seed;
    if (format == "json") {
      cfg.output.json = true;
      cfg.output.csv = false;
    } else if (format == "csv") {
      cfg.output.json = false;
      cfg.output.csv = true;
    }

    if (app.got_subcommand(run_cmd)) return cmd_run(cfg);
    if (app.got_subcommand(constants_cmd)) return cmd_constants(cfg);
    if (app.got_subcommand(identities_cmd)) return cmd_identities(cfg);
    if (app.got_subcommand(mc_cmd)) return cmd_mc(cfg);
    if (app.got_subcommand(solve_cmd)) return cmd_solve(cfg);
    std::fprintf(stderr, "no subcommand selected\n");
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime fault: %s\n", e.what());
    return 3;
  }
}
