#include "pidbounds/response.hpp"

#include <algorithm>
#include <stdexcept>

namespace pidbounds {

std::size_t ResponseSpace::slot(const std::string& name) const {
  auto it = slot_of_.find(name);
  if (it == slot_of_.end())
    throw std::invalid_argument("not an endogenous variable of the space: " + name);
  return it->second;
}

std::vector<int> ResponseSpace::arm_values(std::size_t arm) const {
  std::vector<int> out(instruments_.size());
  for (std::size_t i = instruments_.size(); i-- > 0;) {
    out[i] = static_cast<int>(arm % cards_[i]);
    arm /= cards_[i];
  }
  return out;
}

std::size_t ResponseSpace::arm_index(std::span<const int> values) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < instruments_.size(); ++i)
    idx = idx * cards_[i] + static_cast<std::size_t>(values[i]);
  return idx;
}

std::vector<std::size_t> ResponseSpace::decode(std::size_t atom) const {
  std::vector<std::size_t> profiles(children_.size());
  for (std::size_t i = 0; i < children_.size(); ++i) {
    profiles[i] = atom / atom_strides_[i] % profile_counts_[i];
  }
  return profiles;
}

std::size_t ResponseSpace::encode(std::span<const std::size_t> profiles) const {
  std::size_t atom = 0;
  for (std::size_t i = 0; i < children_.size(); ++i)
    atom += profiles[i] * atom_strides_[i];
  return atom;
}

int ResponseSpace::profile_value(std::size_t child, std::size_t profile,
                                 std::size_t setting) const {
  const std::size_t card = cards_[instruments_.size() + child];
  return static_cast<int>(profile / profile_divisors_[child][setting] % card);
}

ResponseSpace enumerate_response_space(const NetworkSpec& spec, const FineWitness& witness,
                                       std::size_t atom_cap) {
  ResponseSpace out;
  out.spec_ = spec;
  out.witness_ = witness;
  out.instruments_ = witness.instruments;
  out.children_ = witness.children;

  for (const auto& name : out.instruments_) {
    out.slot_of_[name] = out.names_.size();
    out.names_.push_back(name);
    out.cards_.push_back(spec.variable(name).cardinality);
  }
  for (const auto& name : out.children_) {
    out.slot_of_[name] = out.names_.size();
    out.names_.push_back(name);
    out.cards_.push_back(spec.variable(name).cardinality);
  }

  out.arm_count_ = 1;
  for (std::size_t i = 0; i < out.instruments_.size(); ++i)
    out.arm_count_ *= static_cast<std::size_t>(out.cards_[i]);

  const std::size_t k = out.children_.size();
  out.child_parent_slots_.resize(k);
  out.profile_counts_.resize(k);
  out.setting_counts_.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& name = out.children_[i];
    for (const auto& p : spec.endogenous_parents(name))
      out.child_parent_slots_[i].push_back(out.slot(p));
    std::size_t settings = 1;
    for (auto ps : out.child_parent_slots_[i])
      settings *= static_cast<std::size_t>(out.cards_[ps]);
    out.setting_counts_[i] = settings;

    const std::size_t card = static_cast<std::size_t>(out.cards_[out.instruments_.size() + i]);
    std::size_t profiles = 1;
    for (std::size_t s = 0; s < settings; ++s) {
      if (profiles > atom_cap / card + 1) throw std::invalid_argument("problem too large");
      profiles *= card;
    }
    out.profile_counts_[i] = profiles;

    out.profile_divisors_.emplace_back(settings, 1);
    for (std::size_t s = settings; s-- > 0;) {
      if (s + 1 < settings)
        out.profile_divisors_[i][s] = out.profile_divisors_[i][s + 1] * card;
    }
  }

  out.atom_strides_.assign(k, 1);
  std::size_t count = 1;
  for (std::size_t i = k; i-- > 0;) {
    out.atom_strides_[i] = count;
    if (out.profile_counts_[i] != 0 && count > atom_cap / out.profile_counts_[i])
      throw std::invalid_argument("problem too large");
    count *= out.profile_counts_[i];
  }
  if (count > atom_cap) throw std::invalid_argument("problem too large");
  out.atom_count_ = count;

  // Children evaluated in the network's topological order.
  for (const auto& name : spec.topological_order) {
    auto it = std::find(out.children_.begin(), out.children_.end(), name);
    if (it != out.children_.end())
      out.eval_order_.push_back(static_cast<std::size_t>(it - out.children_.begin()));
  }
  return out;
}

Intervention make_intervention(const ResponseSpace& space,
                               const std::map<std::string, int>& by_name) {
  Intervention out;
  for (const auto& [name, value] : by_name) {
    if (space.spec().has_variable(name) &&
        space.spec().variable(name).role == Role::exogenous)
      throw std::invalid_argument("cannot intervene on exogenous variable: " + name);
    std::size_t s = space.slot(name);
    if (value < 0 || value >= space.cardinality(s))
      throw std::invalid_argument("intervention value out of range for " + name);
    out.emplace_back(s, value);
  }
  return out;
}

Propagator::Propagator(const ResponseSpace& space)
    : space_(&space),
      values_(space.slot_count(), 0),
      profiles_(space.child_count(), 0) {}

std::span<const int> Propagator::run(std::size_t atom,
                                     std::span<const int> instrument_values,
                                     const Intervention& intervention) {
  const auto& sp = *space_;
  const std::size_t n_inst = sp.instrument_count();

  for (std::size_t i = 0; i < n_inst; ++i) values_[i] = instrument_values[i];

  for (std::size_t i = 0; i < sp.child_count(); ++i)
    profiles_[i] = atom / sp.atom_strides()[i] % sp.profile_count(i);

  for (std::size_t i : sp.eval_order()) {
    std::size_t setting = 0;
    for (std::size_t ps : sp.child_parent_slots()[i])
      setting = setting * static_cast<std::size_t>(sp.cardinality(ps)) +
                static_cast<std::size_t>(values_[ps]);
    values_[n_inst + i] = sp.profile_value(i, profiles_[i], setting);
  }

  // Clamps win over both instrument values and profiles; children are
  // re-propagated so downstream reads see the clamped value.
  if (!intervention.empty()) {
    for (const auto& [s, v] : intervention) values_[s] = v;
    for (std::size_t i : sp.eval_order()) {
      const std::size_t slot = n_inst + i;
      bool clamped = std::any_of(intervention.begin(), intervention.end(),
                                 [&](const auto& iv) { return iv.first == slot; });
      if (clamped) continue;
      std::size_t setting = 0;
      for (std::size_t ps : sp.child_parent_slots()[i])
        setting = setting * static_cast<std::size_t>(sp.cardinality(ps)) +
                  static_cast<std::size_t>(values_[ps]);
      values_[slot] = sp.profile_value(i, profiles_[i], setting);
    }
  }
  return values_;
}

LinearExpression event_expression(const ResponseSpace& space,
                                  std::span<const int> instrument_values,
                                  const Intervention& intervention,
                                  const std::function<bool(std::span<const int>)>& event) {
  LinearExpression expr;
  Propagator prop(space);
  for (std::size_t atom = 0; atom < space.atom_count(); ++atom) {
    if (event(prop.run(atom, instrument_values, intervention))) expr.add(atom, 1.0);
  }
  return expr;
}

}  // namespace pidbounds
