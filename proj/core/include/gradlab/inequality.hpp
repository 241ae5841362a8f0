#pragma once

#include <map>
#include <string>
#include <vector>

#include "gradlab/bounds.hpp"
#include "gradlab/calculus.hpp"
#include "gradlab/field.hpp"

namespace gradlab {

// Pointwise verification of one closed-form gradient bound.  lhs, rhs and
// mask share the solution grid; slack = rhs - lhs is examined only where the
// mask is set, which always implies t >= grid.mask_floor().  Unmasked
// entries may hold NaN.
struct InequalityReport {
  std::string theorem;
  GridSpec grid;
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<char> mask;
  double tolerance = 0.0;
  double min_slack = 0.0;
  long violations = 0;   // masked nodes with slack < -tolerance
  long masked_count = 0;
  int worst_row = -1;    // location of min_slack
  int worst_node = -1;
  std::map<std::string, double> constants;  // named ingredients of rhs

  bool pass() const { return violations == 0; }
};

// Check selector with its geometric parameters.  center/rho configure the
// ball of the local variants; alpha enters the Li-Yau family (> 1 there);
// shape picks the localizing function for the *_general variants.
struct CheckRequest {
  std::string theorem;
  double alpha = 2.0;
  double rho = 1.0;
  std::vector<double> center = {};
  CutoffShape shape = CutoffShape::Cosine;
};

const std::vector<std::string>& known_theorems();

// sup of |grad u| / u over the region across all grid times, restricted to
// nodes where the gradient stencil applies.  Throws DomainError when the
// selection is empty.
double grad_ratio_sup(const ScalarField& field, const Region& region);

// Runs one named check against the solution.  Every name yields a single
// report except "ricci_local_pair", which yields its two bounds in order.
std::vector<InequalityReport> run_check(const ScalarField& field,
                                        const CheckRequest& request,
                                        const BoundSet& bounds, double tolerance);

}  // namespace gradlab
