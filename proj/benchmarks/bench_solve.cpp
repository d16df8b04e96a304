#include <benchmark/benchmark.h>

#include <random>

#include "pidbounds/constraints.hpp"
#include "pidbounds/network.hpp"
#include "pidbounds/response.hpp"
#include "pidbounds/simplex.hpp"
#include "pidbounds/targets.hpp"

using namespace pidbounds;

namespace {

NetworkSpec iv_graph(int card) {
  NetworkSpec g;
  g.variables = {{"A", 2, Role::observed},
                 {"X", card, Role::latent_target},
                 {"Y", card, Role::observed},
                 {"L", 0, Role::exogenous}};
  g.edges = {{"A", "X"}, {"X", "Y"}, {"L", "X"}, {"L", "Y"}};
  return validate_network(g);
}

ResponseSpace space_of(const NetworkSpec& g) {
  return enumerate_response_space(g, std::get<FineWitness>(check_fine_conditions(g)));
}

ObservedData random_data(const ResponseSpace& space, std::mt19937_64& rng) {
  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::vector<double> psi(space.atom_count());
  double sum = 0.0;
  for (auto& v : psi) sum += (v = gamma(rng));
  for (auto& v : psi) v /= sum;

  const auto slots = observed_child_slots(space);
  std::vector<std::vector<double>> conditionals(
      space.arm_count(), std::vector<double>(observed_outcome_count(space), 0.0));
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
  std::vector<double> marginal(space.arm_count(), 1.0 / space.arm_count());
  return ObservedData::validated(space, std::move(marginal), std::move(conditionals));
}

void bench_enumerate_space(benchmark::State& state) {
  NetworkSpec g = iv_graph(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto space = space_of(g);
    benchmark::DoNotOptimize(space.atom_count());
  }
}
BENCHMARK(bench_enumerate_space)->Arg(2)->Arg(4)->Arg(6);

void bench_compile_observed(benchmark::State& state) {
  NetworkSpec g = iv_graph(static_cast<int>(state.range(0)));
  ResponseSpace space = space_of(g);
  std::mt19937_64 rng(7);
  ObservedData data = random_data(space, rng);
  for (auto _ : state) {
    auto cs = compile_observed(space, data);
    benchmark::DoNotOptimize(cs.size());
  }
}
BENCHMARK(bench_compile_observed)->Arg(2)->Arg(4)->Arg(6);

void bench_solve_bounds(benchmark::State& state) {
  NetworkSpec g = iv_graph(static_cast<int>(state.range(0)));
  ResponseSpace space = space_of(g);
  std::mt19937_64 rng(7);
  ObservedData data = random_data(space, rng);
  auto cs = compile_probability(space, false);
  auto obs = compile_observed(space, data);
  cs.insert(cs.end(), obs.begin(), obs.end());
  TargetSpec target;
  target.kind = TargetKind::ate;
  target.variable = "Y";
  target.intervention_variable = "X";
  auto objective = build_target(space, data, target);
  for (auto _ : state) {
    auto bounds = solve_bounds(space.atom_count(), cs, objective);
    benchmark::DoNotOptimize(bounds.lower);
  }
}
BENCHMARK(bench_solve_bounds)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
