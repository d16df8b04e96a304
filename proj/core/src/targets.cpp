#include "pidbounds/targets.hpp"

#include <cmath>
#include <stdexcept>

namespace pidbounds {

TargetKind target_kind_from_string(const std::string& s) {
  if (s == "pmf") return TargetKind::pmf;
  if (s == "moment" || s == "mean") return TargetKind::moment;
  if (s == "interventional_pmf") return TargetKind::interventional_pmf;
  if (s == "ate") return TargetKind::ate;
  if (s == "prob_nonzero_effect") return TargetKind::prob_nonzero_effect;
  throw std::invalid_argument("unknown target kind: " + s);
}

const char* to_string(TargetKind k) {
  switch (k) {
    case TargetKind::pmf: return "pmf";
    case TargetKind::moment: return "moment";
    case TargetKind::interventional_pmf: return "interventional_pmf";
    case TargetKind::ate: return "ate";
    default: return "prob_nonzero_effect";
  }
}

namespace {

/// Adds per-atom coefficients derived from propagation at one instrument
/// arm, under an optional clamp.
template <typename PerAtom>
void accumulate(LinearExpression& expr, const ResponseSpace& space, Propagator& prop,
                std::span<const int> arm_vals, const Intervention& intervention,
                double weight, PerAtom&& per_atom) {
  if (weight == 0.0) return;
  for (std::size_t atom = 0; atom < space.atom_count(); ++atom) {
    double c = per_atom(prop.run(atom, arm_vals, intervention));
    if (c != 0.0) expr.add(atom, weight * c);
  }
}

}  // namespace

LinearExpression build_target(const ResponseSpace& space, const ObservedData& data,
                              const TargetSpec& target) {
  const std::size_t var_slot = space.slot(target.variable);
  LinearExpression expr;
  Propagator prop(space);

  if (!target.interventional()) {
    // Factual targets average over the observed instrument marginal.
    if (data.instrument_marginal.size() != space.arm_count())
      throw std::invalid_argument("factual target requires the instrument marginal");
    for (std::size_t arm = 0; arm < space.arm_count(); ++arm) {
      const auto arm_vals = space.arm_values(arm);
      double w = data.instrument_marginal[arm];
      switch (target.kind) {
        case TargetKind::pmf:
          accumulate(expr, space, prop, arm_vals, {}, w, [&](std::span<const int> v) {
            return v[var_slot] == target.value ? 1.0 : 0.0;
          });
          break;
        case TargetKind::moment:
          accumulate(expr, space, prop, arm_vals, {}, w, [&](std::span<const int> v) {
            return std::pow(static_cast<double>(v[var_slot]), target.moment_order);
          });
          break;
        default:
          break;
      }
    }
    return expr;
  }

  if (target.intervention_variable.empty())
    throw std::invalid_argument("interventional target requires an intervention variable");
  const std::size_t t_slot = space.slot(target.intervention_variable);
  const int card = space.cardinality(t_slot);
  auto check_value = [&](int v) {
    if (v < 0 || v >= card)
      throw std::invalid_argument("intervention value out of range for " +
                                  target.intervention_variable);
  };
  check_value(target.t);
  if (target.kind != TargetKind::interventional_pmf) check_value(target.t_prime);

  const Intervention do_t{{t_slot, target.t}};
  const Intervention do_t2{{t_slot, target.t_prime}};

  // Average over joint settings of the non-intervened instruments. When the
  // intervened variable is itself an instrument its digit is clamped, so
  // arms differing only there are duplicates; weighting by the full joint
  // marginal still sums to the marginal over the remaining instruments.
  for (std::size_t arm = 0; arm < space.arm_count(); ++arm) {
    const auto arm_vals = space.arm_values(arm);
    if (space.arm_count() > 1 && data.instrument_marginal.size() != space.arm_count())
      throw std::invalid_argument("interventional target requires the instrument marginal");
    double w = space.arm_count() > 1 ? data.instrument_marginal[arm] : 1.0;
    switch (target.kind) {
      case TargetKind::interventional_pmf:
        accumulate(expr, space, prop, arm_vals, do_t, w, [&](std::span<const int> v) {
          return v[var_slot] == target.value ? 1.0 : 0.0;
        });
        break;
      case TargetKind::ate: {
        // E[X(t) - X(t')], evaluated per atom.
        accumulate(expr, space, prop, arm_vals, do_t, w,
                   [&](std::span<const int> v) { return static_cast<double>(v[var_slot]); });
        accumulate(expr, space, prop, arm_vals, do_t2, -w,
                   [&](std::span<const int> v) { return static_cast<double>(v[var_slot]); });
        break;
      }
      case TargetKind::prob_nonzero_effect: {
        Propagator prop_b(space);
        if (w == 0.0) break;
        for (std::size_t atom = 0; atom < space.atom_count(); ++atom) {
          int a = prop.run(atom, arm_vals, do_t)[var_slot];
          int b = prop_b.run(atom, arm_vals, do_t2)[var_slot];
          if (a != b) expr.add(atom, w);
        }
        break;
      }
      default:
        throw std::logic_error("unreachable target kind");
    }
  }
  return expr;
}

}  // namespace pidbounds
