#include "gradlab/config.hpp"

#include <fstream>
#include <sstream>

#include "gradlab/common.hpp"

namespace gradlab {
namespace {

// Typed field access with ConfigError diagnostics naming the offending key.
template <typename T>
T get_as(const ordered_json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config field '" + key + "': " + e.what());
  }
}

template <typename T>
T get_or(const ordered_json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  return get_as<T>(j, key);
}

EvolvingModel parse_model(const ordered_json& j) {
  const auto kind = model_kind_from_string(get_as<std::string>(j, "kind"));
  const double T = get_as<double>(j, "T");
  const ordered_json params = j.value("params", ordered_json::object());
  switch (kind) {
    case ModelKind::ShrinkingSphere: {
      const int n = get_or<int>(j, "n", 2);
      const double c0 = get_or<double>(params, "c0", 1.0);
      return EvolvingModel::shrinking_sphere(n, c0, T);
    }
    case ModelKind::ConformalCircle: {
      ScaleProfile a{get_or<double>(params, "base", 1.0),
                     get_or<double>(params, "amp", 0.0),
                     get_or<double>(params, "omega", 1.0)};
      return EvolvingModel::conformal_circle(a, T);
    }
    case ModelKind::ConformalTorus: {
      const int n = get_or<int>(j, "n", 2);
      ScaleProfile a{get_or<double>(params, "base", 1.0),
                     get_or<double>(params, "amp", 0.0),
                     get_or<double>(params, "omega", 1.0)};
      return EvolvingModel::conformal_torus(n, a, T);
    }
    case ModelKind::StaticHyperbolic: {
      const int n = get_or<int>(j, "n", 2);
      const double kappa = get_or<double>(params, "kappa", 1.0);
      const double R = get_or<double>(params, "R", 2.0);
      return EvolvingModel::static_hyperbolic(n, kappa, R, T);
    }
  }
  throw ConfigError("unreachable model kind");
}

ordered_json model_to_json(const EvolvingModel& m) {
  ordered_json j;
  j["kind"] = to_string(m.kind);
  j["n"] = m.n;
  j["T"] = m.horizon;
  ordered_json params;
  switch (m.kind) {
    case ModelKind::ShrinkingSphere:
      params["c0"] = m.c0;
      break;
    case ModelKind::ConformalCircle:
    case ModelKind::ConformalTorus:
      params["base"] = m.scale.base;
      params["amp"] = m.scale.amp;
      params["omega"] = m.scale.omega;
      break;
    case ModelKind::StaticHyperbolic:
      params["kappa"] = m.kappa;
      params["R"] = m.chart_radius;
      break;
  }
  j["params"] = params;
  return j;
}

CheckRequest parse_check(const ordered_json& j) {
  CheckRequest req;
  req.theorem = get_as<std::string>(j, "theorem");
  req.alpha = get_or<double>(j, "alpha", 2.0);
  req.rho = get_or<double>(j, "rho", 1.0);
  req.center = get_or<std::vector<double>>(j, "center", {});
  req.shape = cutoff_shape_from_string(get_or<std::string>(j, "shape", "cosine"));
  return req;
}

ordered_json check_request_to_json(const CheckRequest& req) {
  ordered_json j;
  j["theorem"] = req.theorem;
  j["alpha"] = req.alpha;
  j["rho"] = req.rho;
  j["center"] = req.center;
  j["shape"] = to_string(req.shape);
  return j;
}

McSection parse_mc(const ordered_json& j) {
  McSection mc;
  mc.config.t_star = get_as<double>(j, "t_star");
  mc.config.x0 = get_as<std::vector<double>>(j, "x0");
  mc.config.n_paths = get_or<long>(j, "n_paths", 10000);
  mc.config.dr = get_or<double>(j, "dr", 1e-3);
  mc.config.checkpoints = get_as<std::vector<double>>(j, "checkpoints");
  mc.config.seed = get_or<std::uint64_t>(j, "seed", 42);
  mc.err_coeff = get_or<double>(j, "err_coeff", 1.0);
  mc.observables.clear();
  for (const auto& name : get_or<std::vector<std::string>>(
           j, "observables", {"one", "first_mode"})) {
    if (name == "one") {
      mc.observables.push_back(McObservable::One);
    } else if (name == "first_mode") {
      mc.observables.push_back(McObservable::FirstMode);
    } else {
      throw ConfigError("unknown mc observable '" + name + "'");
    }
  }
  if (j.contains("supermartingale")) {
    mc.supermartingale =
        functional_kind_from_string(get_as<std::string>(j, "supermartingale"));
    mc.supermartingale_alpha = get_or<double>(j, "supermartingale_alpha", 2.0);
  }
  return mc;
}

ordered_json mc_to_json(const McSection& mc) {
  ordered_json j;
  j["t_star"] = mc.config.t_star;
  j["x0"] = mc.config.x0;
  j["n_paths"] = mc.config.n_paths;
  j["dr"] = mc.config.dr;
  j["checkpoints"] = mc.config.checkpoints;
  j["seed"] = mc.config.seed;
  j["err_coeff"] = mc.err_coeff;
  std::vector<std::string> obs;
  for (auto o : mc.observables) obs.push_back(to_string(o));
  j["observables"] = obs;
  if (mc.supermartingale) {
    j["supermartingale"] = to_string(*mc.supermartingale);
    j["supermartingale_alpha"] = mc.supermartingale_alpha;
  }
  return j;
}

}  // namespace

std::string to_string(CutoffShape shape) {
  return shape == CutoffShape::Cosine ? "cosine" : "cap";
}

CutoffShape cutoff_shape_from_string(const std::string& name) {
  if (name == "cosine") return CutoffShape::Cosine;
  if (name == "cap") return CutoffShape::Cap;
  throw ConfigError("unknown cutoff shape '" + name + "'");
}

CPhiVariant c_phi_variant_from_string(const std::string& name) {
  if (name == "hamilton3") return CPhiVariant::Hamilton3;
  if (name == "hamilton7") return CPhiVariant::Hamilton7;
  if (name == "liyau_alpha") return CPhiVariant::LiYauAlpha;
  throw ConfigError("unknown c_phi variant '" + name + "'");
}

RunConfig parse_config(const ordered_json& j) {
  RunConfig cfg;
  if (!j.contains("model")) throw ConfigError("config needs a 'model' section");
  cfg.model = parse_model(j.at("model"));

  const ordered_json grid = j.value("grid", ordered_json::object());
  cfg.grid.nx = get_or<int>(grid, "nx", 128);
  cfg.grid.nt = get_or<int>(grid, "nt", 201);
  cfg.grid.t_lo = get_or<double>(grid, "t_lo", -1.0);
  cfg.grid.line = get_or<bool>(grid, "line", false);

  const ordered_json sol = j.value("solution", ordered_json::object());
  cfg.solution.kind = get_or<std::string>(sol, "kind", "closed_form");
  if (cfg.solution.kind != "closed_form" && cfg.solution.kind != "numeric")
    throw ConfigError("solution kind must be closed_form or numeric");
  cfg.solution.modes = get_or<std::vector<int>>(sol, "modes", {1});
  cfg.solution.eps = get_or<double>(sol, "eps", 0.3);
  cfg.solution.profile.type = get_or<std::string>(sol, "profile", "cosine");
  cfg.solution.profile.eps = cfg.solution.eps;
  cfg.solution.profile.modes = cfg.solution.modes;
  cfg.solution.profile.width = get_or<double>(sol, "width", 0.5);

  for (const auto& cj : j.value("checks", ordered_json::array()))
    cfg.checks.push_back(parse_check(cj));

  for (const auto& dj : j.value("drift", ordered_json::array())) {
    DriftConfig d;
    d.kind = functional_kind_from_string(get_as<std::string>(dj, "kind"));
    d.alpha = get_or<double>(dj, "alpha", 2.0);
    cfg.drift.push_back(d);
  }

  for (const auto& uj : j.value("cutoff", ordered_json::array())) {
    CutoffConfig c;
    c.center = get_as<std::vector<double>>(uj, "center");
    c.rho = get_or<double>(uj, "rho", 1.0);
    c.shape = cutoff_shape_from_string(get_or<std::string>(uj, "shape", "cosine"));
    c.variants = get_or<std::vector<std::string>>(uj, "variants", {"hamilton3"});
    c.alpha = get_or<double>(uj, "alpha", 2.0);
    for (const auto& v : c.variants) c_phi_variant_from_string(v);
    cfg.cutoffs.push_back(c);
  }

  if (j.contains("mc")) cfg.mc = parse_mc(j.at("mc"));

  const ordered_json out = j.value("output", ordered_json::object());
  cfg.output.dir = get_or<std::string>(out, "dir", "out");
  const auto formats =
      get_or<std::vector<std::string>>(out, "formats", {"json", "csv"});
  cfg.output.json = false;
  cfg.output.csv = false;
  for (const auto& f : formats) {
    if (f == "json") {
      cfg.output.json = true;
    } else if (f == "csv") {
      cfg.output.csv = true;
    } else {
      throw ConfigError("unknown output format '" + f + "'");
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse failure in '" + path + "': " + e.what());
  }
  return parse_config(j);
}

ordered_json config_to_json(const RunConfig& cfg) {
  ordered_json j;
  j["model"] = model_to_json(cfg.model);

  ordered_json grid;
  grid["nx"] = cfg.grid.nx;
  grid["nt"] = cfg.grid.nt;
  grid["t_lo"] = cfg.grid.t_lo;
  grid["line"] = cfg.grid.line;
  j["grid"] = grid;

  ordered_json sol;
  sol["kind"] = cfg.solution.kind;
  sol["modes"] = cfg.solution.modes;
  sol["eps"] = cfg.solution.eps;
  sol["profile"] = cfg.solution.profile.type;
  sol["width"] = cfg.solution.profile.width;
  j["solution"] = sol;

  ordered_json checks = ordered_json::array();
  for (const auto& c : cfg.checks) checks.push_back(check_request_to_json(c));
  j["checks"] = checks;

  ordered_json drift = ordered_json::array();
  for (const auto& d : cfg.drift) {
    ordered_json dj;
    dj["kind"] = to_string(d.kind);
    dj["alpha"] = d.alpha;
    drift.push_back(dj);
  }
  j["drift"] = drift;

  ordered_json cutoffs = ordered_json::array();
  for (const auto& c : cfg.cutoffs) {
    ordered_json cj;
    cj["center"] = c.center;
    cj["rho"] = c.rho;
    cj["shape"] = to_string(c.shape);
    cj["variants"] = c.variants;
    cj["alpha"] = c.alpha;
    cutoffs.push_back(cj);
  }
  j["cutoff"] = cutoffs;

  if (cfg.mc) j["mc"] = mc_to_json(*cfg.mc);

  ordered_json out;
  out["dir"] = cfg.output.dir;
  std::vector<std::string> formats;
  if (cfg.output.json) formats.push_back("json");
  if (cfg.output.csv) formats.push_back("csv");
  out["formats"] = formats;
  j["output"] = out;
  return j;
}

std::string config_hash(const RunConfig& cfg) {
  const std::string dump = config_to_json(cfg).dump();
  return hex64(fnv1a(std::span<const char>(dump.data(), dump.size())));
}

void apply_refinement(RunConfig& cfg, int levels) {
  if (levels < 0) throw ConfigError("refinement levels must be >= 0");
  for (int i = 0; i < levels; ++i) {
    cfg.grid.nx *= 2;
    cfg.grid.nt = 2 * (cfg.grid.nt - 1) + 1;
  }
}

}  // namespace gradlab
