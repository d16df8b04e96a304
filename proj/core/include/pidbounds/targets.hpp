#pragma once

#include <string>

#include "pidbounds/constraints.hpp"
#include "pidbounds/linexpr.hpp"
#include "pidbounds/response.hpp"

namespace pidbounds {

enum class TargetKind { pmf, moment, interventional_pmf, ate, prob_nonzero_effect };

TargetKind target_kind_from_string(const std::string& s);
const char* to_string(TargetKind k);

struct TargetSpec {
  TargetKind kind = TargetKind::moment;
  std::string variable;              // the variable whose distribution is bounded
  int moment_order = 1;              // moment
  int value = 0;                     // pmf / interventional_pmf: P(var = value)
  std::string intervention_variable; // interventional kinds
  int t = 1;                         // do(T = t)
  int t_prime = 0;                   // ate / prob_nonzero_effect comparison arm

  bool interventional() const {
    return kind == TargetKind::interventional_pmf || kind == TargetKind::ate ||
           kind == TargetKind::prob_nonzero_effect;
  }
};

/// Builds the linear objective. Factual targets average over the observed
/// instrument marginal; interventional targets clamp the intervened
/// variable and average only the remaining instruments.
LinearExpression build_target(const ResponseSpace& space, const ObservedData& data,
                              const TargetSpec& target);

}  // namespace pidbounds
