#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pidbounds/linexpr.hpp"
#include "pidbounds/network.hpp"

namespace pidbounds {

/// Enumeration of the response-function distribution. One atom is a joint
/// choice of response profile for every child of the confounder; a profile
/// maps each joint setting of the child's endogenous parents to a value.
///
/// Index conventions (all mixed-radix, first digit most significant):
///   - atom index: digits are the per-child profile indices, in witness
///     child order;
///   - profile index of a child: digits are the child's values at each
///     parent setting, settings ordered lexicographically by parent order;
///   - parent setting / instrument arm / joint outcome indices: digits are
///     the variable values in the respective variable order.
///
/// Endogenous variables occupy dense "slots": instruments first (witness
/// order), then children (witness order).
class ResponseSpace {
 public:
  const NetworkSpec& spec() const { return spec_; }
  const FineWitness& witness() const { return witness_; }

  std::size_t atom_count() const { return atom_count_; }
  std::size_t instrument_count() const { return instruments_.size(); }
  std::size_t child_count() const { return children_.size(); }
  std::size_t slot_count() const { return cards_.size(); }

  /// Slot of an endogenous variable; throws if unknown.
  std::size_t slot(const std::string& name) const;
  const std::string& slot_name(std::size_t s) const { return names_[s]; }
  int cardinality(std::size_t s) const { return cards_[s]; }
  bool is_instrument_slot(std::size_t s) const { return s < instruments_.size(); }

  std::size_t profile_count(std::size_t child) const { return profile_counts_[child]; }

  /// Number of joint instrument settings (1 when there are no instruments).
  std::size_t arm_count() const { return arm_count_; }
  /// Decodes an arm index into per-instrument values.
  std::vector<int> arm_values(std::size_t arm) const;
  std::size_t arm_index(std::span<const int> values) const;

  std::vector<std::size_t> decode(std::size_t atom) const;
  std::size_t encode(std::span<const std::size_t> profiles) const;

  /// Value assigned by child `child`'s profile `profile` at parent setting
  /// `setting`.
  int profile_value(std::size_t child, std::size_t profile, std::size_t setting) const;

  // Internals used by the propagator.
  const std::vector<std::size_t>& atom_strides() const { return atom_strides_; }
  const std::vector<std::vector<std::size_t>>& child_parent_slots() const {
    return child_parent_slots_;
  }
  const std::vector<std::size_t>& eval_order() const { return eval_order_; }

 private:
  friend ResponseSpace enumerate_response_space(const NetworkSpec&, const FineWitness&,
                                                std::size_t);

  NetworkSpec spec_;
  FineWitness witness_;
  std::vector<std::string> instruments_;
  std::vector<std::string> children_;
  std::vector<std::string> names_;  // slot -> name
  std::vector<int> cards_;          // slot -> cardinality
  std::map<std::string, std::size_t> slot_of_;

  std::vector<std::vector<std::size_t>> child_parent_slots_;  // per child
  std::vector<std::size_t> profile_counts_;                   // per child
  std::vector<std::size_t> setting_counts_;                   // per child
  std::vector<std::vector<std::size_t>> profile_divisors_;    // per child, per setting
  std::vector<std::size_t> atom_strides_;                     // per child
  std::vector<std::size_t> eval_order_;  // child indices in topological order
  std::size_t atom_count_ = 0;
  std::size_t arm_count_ = 1;
};

/// Builds the codec; throws std::invalid_argument when the atom count
/// exceeds `atom_cap`.
ResponseSpace enumerate_response_space(const NetworkSpec& spec, const FineWitness& witness,
                                       std::size_t atom_cap = 10'000'000);

/// A clamped variable: (slot, value).
using Intervention = std::vector<std::pair<std::size_t, int>>;

Intervention make_intervention(const ResponseSpace& space,
                               const std::map<std::string, int>& by_name);

/// Allocation-free structural propagation: instruments take the arm values
/// (unless clamped), every child reads its profile at its parents' realized
/// values, clamped variables never read their profile. Reusable across
/// atoms; not thread-safe (one per thread).
class Propagator {
 public:
  explicit Propagator(const ResponseSpace& space);

  /// Returns the endogenous assignment, indexed by slot. The span is valid
  /// until the next run() call.
  std::span<const int> run(std::size_t atom, std::span<const int> instrument_values,
                           const Intervention& intervention = {});

 private:
  const ResponseSpace* space_;
  std::vector<int> values_;
  std::vector<std::size_t> profiles_;
};

/// 0/1 expression selecting the atoms whose propagated assignment satisfies
/// `event`; against a distribution it evaluates to
/// P(event | instruments, do(intervention)).
LinearExpression event_expression(const ResponseSpace& space,
                                  std::span<const int> instrument_values,
                                  const Intervention& intervention,
                                  const std::function<bool(std::span<const int>)>& event);

}  // namespace pidbounds
