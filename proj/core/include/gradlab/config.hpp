#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gradlab/drift.hpp"
#include "gradlab/inequality.hpp"
#include "gradlab/models.hpp"
#include "gradlab/montecarlo.hpp"
#include "gradlab/solve.hpp"

namespace gradlab {

using ordered_json = nlohmann::ordered_json;

struct GridConfig {
  int nx = 128;
  int nt = 201;
  double t_lo = -1.0;  // negative: default floor of four time steps
  bool line = false;   // torus: resolve only the first axis
};

struct SolutionConfig {
  std::string kind = "closed_form";  // closed_form | numeric
  std::vector<int> modes = {1};
  double eps = 0.3;
  InitialProfile profile;  // numeric runs only
};

struct DriftConfig {
  FunctionalKind kind = FunctionalKind::HamiltonH;
  double alpha = 2.0;
};

struct CutoffConfig {
  std::vector<double> center;
  double rho = 1.0;
  CutoffShape shape = CutoffShape::Cosine;
  std::vector<std::string> variants = {"hamilton3"};
  double alpha = 2.0;
};

struct McSection {
  McConfig config;
  std::vector<McObservable> observables = {McObservable::One, McObservable::FirstMode};
  std::optional<FunctionalKind> supermartingale;
  double supermartingale_alpha = 2.0;
  double err_coeff = 1.0;
};

struct OutputConfig {
  std::string dir = "out";
  bool json = true;
  bool csv = true;
};

struct RunConfig {
  EvolvingModel model;
  GridConfig grid;
  SolutionConfig solution;
  std::vector<CheckRequest> checks;
  std::vector<DriftConfig> drift;
  std::vector<CutoffConfig> cutoffs;
  std::optional<McSection> mc;
  OutputConfig output;
};

// Throws ConfigError on malformed or inconsistent input.
RunConfig parse_config(const ordered_json& j);
RunConfig load_config(const std::string& path);

// Canonical serialization: every field, fixed order, normalized values.  The
// provenance hash is FNV-1a over its dump, so formatting differences in the
// source file never change the hash while parameter changes always do.
ordered_json config_to_json(const RunConfig& cfg);
std::string config_hash(const RunConfig& cfg);

// Doubles nx and the time-step count in place (levels >= 0).
void apply_refinement(RunConfig& cfg, int levels);

std::string to_string(CutoffShape shape);
CutoffShape cutoff_shape_from_string(const std::string& name);
CPhiVariant c_phi_variant_from_string(const std::string& name);

}  // namespace gradlab
