#pragma once

#include <string>
#include <vector>

#include "gradlab/bounds.hpp"
#include "gradlab/field.hpp"
#include "gradlab/models.hpp"

namespace gradlab {

// Derived scalar quantity on the field's grid with an applicability mask.
struct QuantityField {
  std::string name;
  GridSpec grid;
  std::vector<double> values;
  std::vector<char> valid;
  int stencil_order = 2;

  double at(int j, int s) const { return values[grid.node(j, s)]; }
  bool ok(int j, int s) const { return valid[grid.node(j, s)] != 0; }
};

struct FieldStats {
  double sup_abs = 0.0;
  double min_value = 0.0;
  double max_value = 0.0;
  long valid_count = 0;
  int worst_row = -1;   // location of sup_abs
  int worst_node = -1;
};

FieldStats field_stats(const QuantityField& f);

// Largest resolved chart step of the grid; tolerance scales use it.
double mesh_h(const GridSpec& grid);

// Supported names: grad_sq, laplacian, q, u_log_u, lap_f, hess_f_norm_sq.
// Scalar quantities are valid on interior, pole, and wall rows; the Hessian
// quantities require full tensor stencils and exclude degenerate bands.
QuantityField differentiate(const ScalarField& field, const std::string& name);

// Residuals of the two evolution identities along solutions:
//   entropy:     (1/2 Lap - dt)(u log u) - (1/2)|grad u|^2 / u
//   q_evolution: (1/2 Lap - dt)(|grad u|^2/u) - u |Hess log u|^2 - R_t(grad u, grad u)/u
// Both shrink at second order for exact solutions.
struct IdentityResiduals {
  QuantityField entropy;
  QuantityField q_evolution;
};

IdentityResiduals identity_residuals(const ScalarField& field);

// slack = u |Hess f|^2 - (u/n)(Lap f)^2 with f = log u; nonnegative up to
// stencil error (Cauchy-Schwarz on the trace).
QuantityField hessian_bound_check(const ScalarField& field);

// residual = (1/2 Lap - dt) q + k(t) q; nonnegative up to stencil error when
// R_t >= -k(t) g holds.
QuantityField rt_lower_residual(const ScalarField& field, const KProfile& k);

// slack of the perturbed Hessian inequality used by the Li-Yau drift:
//   |Hess f|^2 - alpha <dt g, Hess f> - (a alpha / n)(Lap f)^2
//     + (alpha n / 4b) max{k2^2, k3^2}  >=  0
// requires a + b = 1/alpha with a, b > 0.
QuantityField hess_dtg_inequality_check(const ScalarField& field, double alpha,
                                        double a, double b, const BoundSet& bounds);

// Residual of the operator-variation identity at frozen v = u(., t):
//   d/dt (Lap_{g_t} v) + <dt g, Hess v> + <div(dt g) - (1/2) grad tr(dt g), grad v>
// The last pairing vanishes identically on the model family (dt g is a time
// function times g), and is kept at zero.
QuantityField laplacian_variation_check(const EvolvingModel& model,
                                        const ScalarField& field);

}  // namespace gradlab
