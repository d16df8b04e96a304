#pragma once

#include <random>
#include <string>
#include <vector>

#include "pidbounds/constraints.hpp"
#include "pidbounds/network.hpp"
#include "pidbounds/response.hpp"

namespace pidbounds::testing {

inline NetworkSpec iv_graph(int card_x = 2, int card_y = 2, Role role_x = Role::observed) {
  NetworkSpec g;
  g.variables = {{"A", 2, Role::observed},
                 {"X", card_x, role_x},
                 {"Y", card_y, Role::observed},
                 {"L", 0, Role::exogenous}};
  g.edges = {{"A", "X"}, {"X", "Y"}, {"L", "X"}, {"L", "Y"}};
  return validate_network(g);
}

/// A -> X(latent) -> Y proxy, confounded: the randomized-trial graph.
inline NetworkSpec trial_graph(int card_x = 2, int card_y = 2) {
  return iv_graph(card_x, card_y, Role::latent_target);
}

/// No instruments: latent X with a single proxy Y, both under L.
inline NetworkSpec single_proxy_graph(int card_x, int card_y) {
  NetworkSpec g;
  g.variables = {{"X", card_x, Role::latent_target},
                 {"Y", card_y, Role::observed},
                 {"L", 0, Role::exogenous}};
  g.edges = {{"L", "X"}, {"L", "Y"}};
  return validate_network(g);
}

inline NetworkSpec chain_graph(int card_x = 2, int card_y = 2) {
  NetworkSpec g;
  g.variables = {{"A", 2, Role::observed},
                 {"X", card_x, Role::latent_target},
                 {"Y", card_y, Role::observed}};
  g.edges = {{"A", "X"}, {"X", "Y"}};
  return validate_network(g);
}

inline ResponseSpace space_of(const NetworkSpec& g) {
  return enumerate_response_space(g, std::get<FineWitness>(check_fine_conditions(g)));
}

/// Samples a distribution over `n` cells (Dirichlet(1)).
inline std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t n) {
  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::vector<double> p(n);
  double sum = 0.0;
  for (auto& v : p) sum += (v = gamma(rng));
  for (auto& v : p) v /= sum;
  return p;
}

/// Exact observables implied by a response distribution.
inline ObservedData data_from_psi(const ResponseSpace& space, const std::vector<double>& psi,
                                  const std::vector<double>& marginal) {
  const auto slots = observed_child_slots(space);
  const std::size_t outcomes = observed_outcome_count(space);
  std::vector<std::vector<double>> conditionals(space.arm_count(),
                                                std::vector<double>(outcomes, 0.0));
  Propagator prop(space);
  for (std::size_t arm = 0; arm < space.arm_count(); ++arm) {
    const auto arm_vals = space.arm_values(arm);
    for (std::size_t atom = 0; atom < space.atom_count(); ++atom) {
      auto values = prop.run(atom, arm_vals);
      std::size_t o = 0;
      for (auto s : slots) o = o * space.cardinality(s) + values[s];
      conditionals[arm][o] += psi[atom];
    }
  }
  return ObservedData::validated(space, marginal, std::move(conditionals));
}

inline std::string model_path(const std::string& name) {
  return std::string(PIDBOUNDS_MODELS_DIR) + "/" + name;
}

}  // namespace pidbounds::testing
