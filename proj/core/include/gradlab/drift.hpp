#pragma once

#include <functional>
#include <string>

#include "gradlab/bounds.hpp"
#include "gradlab/calculus.hpp"
#include "gradlab/field.hpp"

namespace gradlab {

// The three supermartingale functionals.
//   HamiltonH:   Phi = h(t) q + u log u           (forward profile, h(0) = 0)
//   LiYauSTilde: Phi = h(t)(q - alpha Lap u - n alpha^2 u Ytil(t))   (h(T) = 1)
//   RicciSHat:   Phi = h(t)(q - Lap u - n u (2/t + k))               (h(T) = 1)
enum class FunctionalKind { HamiltonH, LiYauSTilde, RicciSHat };

std::string to_string(FunctionalKind kind);
FunctionalKind functional_kind_from_string(const std::string& name);

struct FunctionalSpec {
  FunctionalKind kind = FunctionalKind::HamiltonH;
  double alpha = 2.0;     // S-tilde only; beta = alpha^2
  BoundSet bounds;        // H: k profile; S-tilde: k1..k4
  double ric_upper = 0.0; // S-hat: 0 <= Ric <= ric_upper
  double horizon = 1.0;   // T anchoring the backward profiles
};

// Coefficient profile h(t).  hy carries the algebraically simplified product
// h(t) * (2/t + C) for the backward kinds so t -> 0 never forms 0 * inf;
// it is unset for HamiltonH.
struct HProfile {
  std::function<double(double)> h;
  std::function<double(double)> hy;
  double rate_const = 0.0;  // C in the backward exponent, or the constant k of H
  std::string desc;
};

HProfile h_profile(const FunctionalSpec& spec);

// Verifies hdot + k h = 1/2 for the Hamilton profile with hdot obtained by
// fourth-order finite differencing of h itself (independent of the ODE);
// returns the max relative error against 1/2 over interior samples.
double h_identity_max_relerr(const FunctionalSpec& spec, const HProfile& prof,
                             int samples = 64);

// Curvature offset Ytil(t) - 2/t of the S-tilde profile.
double s_tilde_rate_const(const FunctionalSpec& spec);

// Phi sampled on the field's grid; valid everywhere the scalar stencils are.
QuantityField functional_field(const FunctionalSpec& spec, const ScalarField& field,
                               const HProfile& prof);

struct DriftReport {
  std::string kind;
  double masked_sup = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  int worst_row = -1;
  int worst_node = -1;
  long masked_count = 0;
  QuantityField drift;  // (dt - 1/2 Lap) Phi with the applicability mask
};

// D[Phi] = (dt - 1/2 Lap_{g_t}) Phi by finite differences; pass iff the
// masked sup stays at or below the tolerance.
DriftReport drift_field(const FunctionalSpec& spec, const ScalarField& field,
                        const HProfile& prof, double tol);

}  // namespace gradlab
