#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pidbounds/linexpr.hpp"

namespace pidbounds {

struct SimplexOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  // Iterations without objective improvement before switching from Dantzig
  // to Bland's rule.
  double stall_factor = 5.0;
};

struct SimplexResult {
  SolveStatus status = SolveStatus::optimal;
  double objective = 0.0;
  std::vector<double> solution;  // primal values of the structural variables
  int iterations = 0;
  // Phase-1 residual per constraint (artificial value left in the basis);
  // nonzero entries point at the constraints blocking feasibility.
  std::vector<double> infeasibility_by_constraint;
};

/// Two-phase dense tableau simplex. Infeasible / unbounded are statuses,
/// never exceptions.
SimplexResult simplex_solve(const LinearProgram& lp, const SimplexOptions& options = {});

struct BoundsDiagnostics {
  int iterations_lower = 0;
  int iterations_upper = 0;
  double max_constraint_residual = 0.0;
  std::vector<std::pair<std::string, double>> infeasible_labels;  // label, residual
};

struct Bounds {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<double> lower_witness;
  std::vector<double> upper_witness;
  SolveStatus status = SolveStatus::optimal;
  BoundsDiagnostics diagnostics;
};

/// Minimizes and maximizes the objective over the constraint set and
/// attaches the witness distributions. Infeasibility means the observed
/// data are incompatible with the assumptions.
Bounds solve_bounds(std::size_t variable_count,
                    const std::vector<LinearConstraint>& constraints,
                    const LinearExpression& objective,
                    const SimplexOptions& options = {});

/// Plain-text dump, one constraint per line:
///   label | index:value ... | relation | rhs
/// with the objective on the first line. Meant for debugging and
/// cross-solver validation.
void dump_lp(std::ostream& os, const LinearProgram& lp);

}  // namespace pidbounds
