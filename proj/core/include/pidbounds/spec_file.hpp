#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pidbounds/constraints.hpp"
#include "pidbounds/network.hpp"
#include "pidbounds/targets.hpp"

namespace pidbounds {

/// Observed tables as written in a model-spec file: keyed by explicit
/// variable lists so they survive graph rewrites. `instruments` orders the
/// marginal's mixed-radix digits, `outcomes` the conditionals'.
struct ObservedSection {
  std::vector<std::string> instruments;
  std::vector<std::string> outcomes;
  std::vector<double> marginal;                      // over joint instrument values
  std::vector<std::vector<double>> conditionals;     // per arm, over joint outcomes
};

struct SweepPlan {
  // Assumption-kind subsets; empty kind list = graph-only constraints.
  std::vector<std::vector<std::string>> subsets;
  // Parameter grid applied to one assumption, addressed as "kind.field",
  // e.g. "A0.epsilon". Crossed with `subsets` when both are present.
  std::string parameter;
  std::vector<double> values;

  bool empty() const { return subsets.empty() && values.empty(); }
};

struct ModelFile {
  NetworkSpec network;
  ObservedSection observed;
  std::vector<AssumptionSpec> assumptions;
  TargetSpec target;
  SweepPlan sweep;
};

/// Parses and fully validates a model-spec JSON file. Distributions off by
/// more than 1e-9 are rejected, never renormalized. Errors carry the
/// offending section/field.
ModelFile parse_spec(const std::string& path);
ModelFile parse_spec_text(const std::string& text, const std::string& origin = "<string>");

}  // namespace pidbounds
