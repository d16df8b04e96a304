#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pidbounds/linexpr.hpp"
#include "pidbounds/response.hpp"

namespace pidbounds {

/// Known observed distributions: the joint instrument marginal and, per
/// instrument arm, the joint distribution of the observed children (latent
/// children marginalized out). Indexed by the space's mixed-radix codecs.
struct ObservedData {
  std::vector<double> instrument_marginal;          // length arm_count
  std::vector<std::vector<double>> arm_conditionals;  // arm -> outcome table

  static ObservedData validated(const ResponseSpace& space,
                                std::vector<double> marginal,
                                std::vector<std::vector<double>> conditionals,
                                double tol = 1e-9);
};

/// Slots of the observed children, in witness child order; the joint
/// outcome index is mixed-radix over these.
std::vector<std::size_t> observed_child_slots(const ResponseSpace& space);
std::size_t observed_outcome_count(const ResponseSpace& space);

enum class MeasurementKind { A0, A1, A2, A3 };
enum class CausalKind { A4, A5 };
enum class ConstraintLevel { observed, per_arm_counterfactual };

MeasurementKind measurement_kind_from_string(const std::string& s);

struct MeasurementParams {
  double epsilon = 0.0;             // A0 mass budget
  double lambda = 0.0;              // A2 asymmetry budget
  int distance_threshold = 0;       // A0: only |x-y| > threshold counts
  double slack = 0.0;               // softening for the equality kinds
  ConstraintLevel level = ConstraintLevel::observed;
  std::string truth_variable;       // defaulted from the graph when empty
  std::string proxy_variable;
  // Optional override of the |x - y| distance; row-major truth x proxy.
  std::optional<std::vector<std::vector<double>>> distance;
};

struct CausalParams {
  std::string treatment_variable;   // A4: the intervened variable
  std::string outcome_variable;     // A4: truth; A5: ignored (profiles of proxy)
  std::string truth_variable;       // A5
  std::string proxy_variable;       // A5
  double slack = 0.0;
};

/// One declarative assumption as it appears in a model-spec file.
struct AssumptionSpec {
  std::string kind;  // "A0".."A5"
  MeasurementParams measurement;
  CausalParams causal;
};

/// sum psi = 1 plus one psi_i >= 0 bound per atom. The bounds are implied
/// by the solver's standard form; `include_nonnegativity` = false omits
/// them to keep large constraint sets small.
std::vector<LinearConstraint> compile_probability(const ResponseSpace& space,
                                                  bool include_nonnegativity = true);

/// Per arm and per joint observed-child outcome: the selecting expression
/// equals the conditional probability. Latent children are marginalized by
/// the event itself.
std::vector<LinearConstraint> compile_observed(const ResponseSpace& space,
                                               const ObservedData& data);

/// Measurement-error families A0-A3 over the (truth, proxy) pair, at the
/// observed level (arm-averaged with the instrument marginal) or once per
/// instrument arm on the counterfactual pair (X_a, Y_{X_a}).
std::vector<LinearConstraint> compile_measurement(const ResponseSpace& space,
                                                  const ObservedData& data,
                                                  MeasurementKind kind,
                                                  const MeasurementParams& params);

/// Monotonicity families: A4 bounds the mass where the outcome under a
/// higher treatment is lower; A5 the same over proxy response profiles.
std::vector<LinearConstraint> compile_causal(const ResponseSpace& space, CausalKind kind,
                                             const CausalParams& params);

/// Dispatch on AssumptionSpec::kind.
std::vector<LinearConstraint> compile_assumption(const ResponseSpace& space,
                                                 const ObservedData& data,
                                                 const AssumptionSpec& assumption);

/// Default (truth, proxy) pair: the unique latent-target variable and its
/// unique observed child (or, failing that, the unique observed child of
/// the confounder). Throws when ambiguous and not overridden.
std::pair<std::string, std::string> default_measurement_pair(const ResponseSpace& space);

}  // namespace pidbounds
