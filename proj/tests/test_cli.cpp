#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include "gradlab/config.hpp"
#include "gradlab/runner.hpp"

using namespace gradlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path p = fs::temp_directory_path() / "gradlab_cli_test";
  fs::create_directories(p);
  return p;
}

fs::path write_json(const std::string& name, const ordered_json& j) {
  const fs::path p = scratch_dir() / name;
  std::ofstream out(p);
  out << j.dump(2) << "\n";
  return p;
}

ordered_json circle_config(int nx = 48, int nt = 61) {
  ordered_json j;
  j["model"] = {{"kind", "conformal_circle"},
                {"T", 1.0},
                {"params", {{"base", 1.0}, {"amp", 0.0}, {"omega", 1.0}}}};
  j["grid"] = {{"nx", nx}, {"nt", nt}};
  j["solution"] = {{"kind", "closed_form"}, {"modes", {1}}, {"eps", 0.5}};
  j["checks"] = ordered_json::array({{{"theorem", "hamilton_global"}}});
  j["drift"] = ordered_json::array({{{"kind", "hamilton_h"}}});
  j["output"] = {{"dir", (scratch_dir() / "out").string()},
                 {"formats", {"json", "csv"}}};
  return j;
}

// Runs the installed binary when the test harness exports its location;
// returns -1 when unavailable so callers can skip.
int run_binary(const std::string& args) {
  const char* bin = std::getenv("GRADLAB_BIN");
  if (bin == nullptr) return -1;
  const std::string cmd =
      std::string("\"") + bin + "\" " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("canonical serialization round-trips") {
  const RunConfig cfg = parse_config(circle_config());
  const ordered_json once = config_to_json(cfg);
  const RunConfig again = parse_config(once);
  CHECK(config_to_json(again).dump() == once.dump());
  CHECK(config_hash(cfg) == config_hash(again));
}

TEST_CASE("hash tracks parameters, not formatting") {
  const RunConfig a = parse_config(circle_config());
  RunConfig b = parse_config(circle_config());
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);

  b.grid.nx = 96;
  CHECK(config_hash(a) != config_hash(b));

  RunConfig c = parse_config(circle_config());
  c.solution.eps = 0.25;
  CHECK(config_hash(a) != config_hash(c));

  RunConfig d = parse_config(circle_config());
  d.output.dir = "elsewhere";
  CHECK(config_hash(a) != config_hash(d));
}

TEST_CASE("refinement doubles the mesh and the step count") {
  RunConfig cfg = parse_config(circle_config(128, 201));
  apply_refinement(cfg, 0);
  CHECK(cfg.grid.nx == 128);
  CHECK(cfg.grid.nt == 201);
  apply_refinement(cfg, 1);
  CHECK(cfg.grid.nx == 256);
  CHECK(cfg.grid.nt == 401);
  apply_refinement(cfg, 2);
  CHECK(cfg.grid.nx == 1024);
  CHECK(cfg.grid.nt == 1601);
}

TEST_CASE("config loading reports file problems as config errors") {
  CHECK_THROWS_AS(load_config((scratch_dir() / "missing.json").string()),
                  ConfigError);

  const fs::path bad = scratch_dir() / "bad.json";
  std::ofstream(bad) << "{ not json";
  CHECK_THROWS_AS(load_config(bad.string()), ConfigError);

  // structurally valid JSON, semantically broken: model block absent
  const fs::path empty = write_json("empty.json", ordered_json::object());
  CHECK_THROWS_AS(load_config(empty.string()), ConfigError);
}

TEST_CASE("invalid check parameters are rejected before any work") {
  ordered_json j = circle_config();
  j["checks"] = ordered_json::array(
      {{{"theorem", "liyau_global"}, {"alpha", 1.0}}});
  const RunConfig cfg = parse_config(j);
  CHECK_THROWS_WITH_AS(static_cast<void>(run_lab(cfg)),
                       doctest::Contains("alpha"), ConfigError);
}

TEST_CASE("lab run produces a full report with the expected blocks") {
  const RunConfig cfg = parse_config(circle_config());
  const LabResult lab = run_lab(cfg);
  CHECK(lab.pass);
  CHECK(lab.failures.empty());

  const ordered_json& r = lab.report;
  REQUIRE(r.contains("provenance"));
  CHECK(r.at("provenance").at("config_hash").get<std::string>() ==
        config_hash(cfg));
  CHECK(r.at("provenance").contains("grid"));
  CHECK(r.at("provenance").contains("tolerances"));
  REQUIRE(r.contains("model"));
  REQUIRE(r.contains("bounds"));
  CHECK(r.at("bounds").at("verified").get<bool>());
  REQUIRE(r.contains("solution"));
  CHECK(r.at("solution").at("sup_norm").get<double>() == doctest::Approx(1.5));
  REQUIRE(r.contains("identities"));
  REQUIRE(r.contains("checks"));
  CHECK(r.at("checks").size() == 1);
  CHECK(r.at("checks")[0].at("pass").get<bool>());
  REQUIRE(r.contains("drift"));
  CHECK(r.at("drift")[0].at("pass").get<bool>());
  CHECK(r.at("drift")[0].contains("h_identity_relerr"));
  REQUIRE(r.contains("status"));
  CHECK(r.at("status").at("pass").get<bool>());

  CHECK(lab.checks.size() == 1);
  CHECK(lab.drifts.size() == 1);
}

TEST_CASE("output files land under the configured directory") {
  ordered_json j = circle_config();
  const fs::path dir = scratch_dir() / "out_files";
  fs::remove_all(dir);
  j["output"]["dir"] = dir.string();
  const RunConfig cfg = parse_config(j);
  const LabResult lab = run_lab(cfg);
  write_outputs(cfg, lab);

  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "hamilton_global.csv"));
  CHECK(fs::exists(dir / "drift_hamilton_h.csv"));

  std::ifstream in(dir / "report.json");
  ordered_json parsed;
  in >> parsed;
  CHECK(parsed.at("status").at("pass").get<bool>());
}

TEST_CASE("exit codes separate pass, check failure, and faults") {
  if (std::getenv("GRADLAB_BIN") == nullptr) {
    MESSAGE("GRADLAB_BIN not set; skipping subprocess checks");
    return;
  }

  SUBCASE("clean run exits zero") {
    const fs::path cfg = write_json("ok.json", circle_config());
    const fs::path out = scratch_dir() / "ok_out";
    CHECK(run_binary("run --config " + cfg.string() + " --out " +
                     out.string()) == 0);
  }

  SUBCASE("invalid parameter exits two") {
    ordered_json j = circle_config();
    j["checks"] = ordered_json::array(
        {{{"theorem", "liyau_global"}, {"alpha", 1.0}}});
    const fs::path cfg = write_json("alpha_one.json", j);
    CHECK(run_binary("run --config " + cfg.string()) == 2);
  }

  SUBCASE("missing config exits two") {
    CHECK(run_binary("run --config " +
                     (scratch_dir() / "nope.json").string()) == 2);
  }

  SUBCASE("failed verdict exits one") {
    // paths launched at the pole saturate the degenerate band counter
    ordered_json j;
    j["model"] = {{"kind", "shrinking_sphere"},
                  {"n", 2},
                  {"T", 0.5},
                  {"params", {{"c0", 1.0}}}};
    j["grid"] = {{"nx", 32}, {"nt", 41}};
    j["solution"] = {{"kind", "closed_form"}, {"modes", {1}}, {"eps", 0.3}};
    j["mc"] = {{"t_star", 0.05},     {"x0", {0.01, 0.0}},
               {"n_paths", 500},     {"dr", 0.001},
               {"checkpoints", {0.05}}, {"seed", 9},
               {"observables", {"one"}}};
    j["output"] = {{"dir", (scratch_dir() / "band_out").string()},
                   {"formats", {"json"}}};
    const fs::path cfg = write_json("band.json", j);
    CHECK(run_binary("run --config " + cfg.string()) == 1);
  }

  SUBCASE("empty check mask exits three") {
    // ball radius below half the mesh width around an off-node center
    ordered_json j = circle_config();
    j["checks"] = ordered_json::array({{{"theorem", "hamilton_local"},
                                        {"center", {0.07}},
                                        {"rho", 0.01}}});
    const fs::path cfg = write_json("tiny_ball.json", j);
    CHECK(run_binary("run --config " + cfg.string()) == 3);
  }

  SUBCASE("seed override is harmless without an mc section") {
    const fs::path cfg = write_json("seedless.json", circle_config());
    const fs::path out = scratch_dir() / "seed_out";
    CHECK(run_binary("run --config " + cfg.string() + " --out " +
                     out.string() + " --seed 7") == 0);
  }

  SUBCASE("identities command passes on the calibration model") {
    const fs::path cfg = write_json("ident.json", circle_config());
    CHECK(run_binary("identities --config " + cfg.string()) == 0);
  }

  SUBCASE("constants command renders the table") {
    const fs::path cfg = write_json("const.json", circle_config());
    CHECK(run_binary("constants --config " + cfg.string()) == 0);
  }
}
