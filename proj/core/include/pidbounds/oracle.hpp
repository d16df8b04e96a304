#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pidbounds/analytic.hpp"
#include "pidbounds/constraints.hpp"
#include "pidbounds/linexpr.hpp"
#include "pidbounds/network.hpp"
#include "pidbounds/simplex.hpp"
#include "pidbounds/targets.hpp"

namespace pidbounds {

struct OracleOptions {
  std::size_t variable_cap = 24;
  std::size_t combination_cap = 20'000'000;
};

/// Exact min/max by enumerating every basic feasible solution (all maximal
/// independent active-constraint choices). Shares nothing with the simplex
/// beyond the LP types; used to cross-check it.
Bounds oracle_bounds(const LinearProgram& lp, const OracleOptions& options = {});

/// Direct grid search over the chain parameterization
/// (q_{1|0}, q_{1|1}) with per-arm feasibility of pi_{1|a}; returns the
/// hull of attained P(X=1) per branch. Converges to the analytic set as
/// `resolution` -> 0.
IntervalUnion parametric_chain_search(const std::vector<double>& p_y,
                                      const std::vector<std::vector<double>>& p_y_given_a,
                                      std::optional<Prop3Variant> restriction,
                                      double resolution);

struct ContainmentTrial {
  bool pass = false;
  bool sampler_failed = false;
  double true_value = 0.0;
  Bounds bounds;
  std::string note;
};

/// Samples a response distribution consistent with the assumptions, derives
/// exact observables from it, runs the full pipeline and checks that the
/// true target value falls inside the solved bounds.
ContainmentTrial generative_containment_trial(const NetworkSpec& spec,
                                              const std::vector<AssumptionSpec>& assumptions,
                                              const TargetSpec& target, std::uint64_t seed);

}  // namespace pidbounds
