#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gradlab/drift.hpp"
#include "gradlab/field.hpp"
#include "gradlab/models.hpp"

namespace gradlab {

// Path simulation request.  The process starts at x0 with simulation clock r
// and diffuses under g_{t_star - r}, so its time-r law matches the heat
// semigroup evaluated at (x0, t_star) once r reaches t_star.
struct McConfig {
  double t_star = 1.0;
  std::vector<double> x0;           // chart coordinates of the start point
  long n_paths = 10000;
  double dr = 1e-3;                 // nominal step; spans divide into equal substeps
  std::vector<double> checkpoints;  // recording times, ascending in (0, t_star]
  std::uint64_t seed = 42;
};

// Flattened positions per checkpoint.  Representation by model: circle and
// torus keep the unwrapped chart coordinates, the sphere keeps embedded unit
// vectors in R^{n+1}, the hyperbolic chart keeps the radial coordinate alone.
struct PathEnsemble {
  EvolvingModel model;
  McConfig config;
  int coord_dim = 0;
  std::vector<double> positions;  // [checkpoint][path][coord]
  long total_steps = 0;
  long band_entries = 0;   // sphere steps landing inside the polar band
  bool band_flag = false;  // band entries reached 1% of all steps

  double at(int checkpoint, long path, int d) const {
    return positions[(checkpoint * config.n_paths + path) * coord_dim + d];
  }
};

// Euler-Maruyama over the checkpoint schedule; one deterministic Gaussian
// stream per path, so results depend only on (config, model).
PathEnsemble simulate_paths(const EvolvingModel& model, const McConfig& config);

enum class McObservable { One, FirstMode };

std::string to_string(McObservable obs);

// Heat-semigroup mean of the observable at (x0, t_star).  The first mode is
// an eigenfunction at every time, so the closed form is its shape at x0
// times the accumulated decay.
double mc_reference(const EvolvingModel& model, McObservable obs,
                    const McConfig& config);

struct WeakErrorReport {
  std::string observable;
  double mean = 0.0;
  double std_error = 0.0;
  double reference = 0.0;
  double allowance = 0.0;  // 3 SE + err_coeff * dr
  long n_paths = 0;
  bool pass = false;
};

// Compares the ensemble mean of the observable at the final checkpoint
// (which must sit at t_star) against the reference value.
WeakErrorReport weak_error(const PathEnsemble& ensemble, McObservable obs,
                           double reference, double err_coeff = 1.0);

struct CheckpointStat {
  double r = 0.0;  // simulation time
  double t = 0.0;  // heat time t_star - r
  double mean = 0.0;
  double std_error = 0.0;
};

struct SupermartingaleReport {
  std::string kind;
  std::vector<CheckpointStat> stats;
  double worst_margin = 0.0;  // min over consecutive diffs of mean + 3 SE
  bool pass = false;
};

// The backward-time supermartingale property makes the ensemble means of
// Phi(X_r, t_star - r) nondecreasing in r.  Consecutive checkpoints are
// compared through pathwise differences (common random numbers).
// Checkpoints whose heat time falls below the field's mask floor are
// skipped; at least two must survive.
SupermartingaleReport supermartingale_test(const PathEnsemble& ensemble,
                                           const FunctionalSpec& spec,
                                           const ScalarField& field);

}  // namespace gradlab
