#include <algorithm>

#include "doctest.h"
#include "helpers.hpp"
#include "pidbounds/constraints.hpp"
#include "pidbounds/simplex.hpp"
#include "pidbounds/targets.hpp"

using namespace pidbounds;
namespace pt = pidbounds::testing;

namespace {

const LinearConstraint* find_label(const std::vector<LinearConstraint>& cs,
                                   const std::string& prefix) {
  for (const auto& c : cs)
    if (c.label.rfind(prefix, 0) == 0) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("probability constraints: one equality plus per-atom bounds") {
  ResponseSpace space = pt::space_of(pt::iv_graph());
  auto cs = compile_probability(space);
  CHECK(cs.size() == 17);
  CHECK(cs[0].relation == Relation::eq);
  CHECK(cs[0].rhs == 1.0);
  CHECK(cs[0].expression.term_count() == 16);
  CHECK(compile_probability(space, false).size() == 1);
}

TEST_CASE("degenerate one-atom space forces psi0 = 1") {
  // Two binary children with no endogenous parents would still give 4 atoms;
  // the minimal space needs cardinality 2, so check the constraint instead.
  ResponseSpace space = pt::space_of(pt::single_proxy_graph(2, 2));
  auto cs = compile_probability(space);
  CHECK(cs[0].expression.term_count() == space.atom_count());
}

TEST_CASE("observed constraints pin y through the realized x profile") {
  // Trial graph: only Y is observed; arm a=0, y=0 selects atoms with
  // y~ at x~_0 equal to 0, i.e. half of the 16 atoms.
  ResponseSpace space = pt::space_of(pt::trial_graph());
  ObservedData data{{0.5, 0.5}, {{0.6, 0.4}, {0.4, 0.6}}};
  auto cs = compile_observed(space, data);
  REQUIRE(cs.size() == 4);
  CHECK(cs[0].expression.term_count() == 8);
  CHECK(cs[0].rhs == 0.6);
  CHECK(cs[0].relation == Relation::eq);
}

TEST_CASE("no-instrument mode matches the proxy marginal") {
  ResponseSpace space = pt::space_of(pt::single_proxy_graph(3, 3));
  ObservedData data{{1.0}, {{0.5, 0.3, 0.2}}};
  auto cs = compile_observed(space, data);
  REQUIRE(cs.size() == 3);
  for (const auto& c : cs) CHECK(c.expression.term_count() == 3);  // sum over x
  CHECK(cs[1].rhs == 0.3);
}

TEST_CASE("degenerate conditional forces complementary mass to zero") {
  ResponseSpace space = pt::space_of(pt::trial_graph());
  ObservedData data{{1.0, 0.0}, {{1.0, 0.0}, {}}};
  auto cs = compile_observed(space, data);
  // P(Y=1|A=0) = 0: any feasible psi puts no mass on those atoms.
  auto bounds = solve_bounds(space.atom_count(), [&] {
    auto all = compile_probability(space);
    all.insert(all.end(), cs.begin(), cs.end());
    return all;
  }(), cs[1].expression);
  CHECK(bounds.status == SolveStatus::optimal);
  CHECK(bounds.upper <= 1e-9);
}

TEST_CASE("A0 with a distance threshold sums exactly the far cells") {
  ResponseSpace space = pt::space_of(pt::single_proxy_graph(6, 6));
  ObservedData data{{1.0}, {{0.3, 0.25, 0.2, 0.1, 0.1, 0.05}}};
  MeasurementParams params;
  params.epsilon = 0.01;
  params.distance_threshold = 2;
  auto cs = compile_measurement(space, data, MeasurementKind::A0, params);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].relation == Relation::le);
  CHECK(cs[0].rhs == 0.01);
  // Cells with |x-y| > 2: 2 * (3 + 2 + 1) = 12 of the 36 atoms.
  CHECK(cs[0].expression.term_count() == 12);
}

TEST_CASE("A1 in the binary case pins the single y<x cell") {
  ResponseSpace space = pt::space_of(pt::single_proxy_graph(2, 2));
  ObservedData data{{1.0}, {{0.4, 0.6}}};
  auto cs = compile_measurement(space, data, MeasurementKind::A1, {});
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].relation == Relation::eq);
  CHECK(cs[0].rhs == 0.0);
  CHECK(cs[0].expression.term_count() == 1);  // the (x=1, y=0) atom
}

TEST_CASE("A2 emits opposing inequalities per equidistant pair") {
  ResponseSpace space = pt::space_of(pt::single_proxy_graph(6, 6));
  ObservedData data{{1.0}, {{0.3, 0.25, 0.2, 0.1, 0.1, 0.05}}};
  MeasurementParams params;
  params.lambda = 0.05;
  auto cs = compile_measurement(space, data, MeasurementKind::A2, params);
  const auto* plus = find_label(cs, "A2[observed,x=2,y=1,y'=3,+]");
  const auto* minus = find_label(cs, "A2[observed,x=2,y=1,y'=3,-]");
  REQUIRE(plus != nullptr);
  REQUIRE(minus != nullptr);
  CHECK(plus->rhs == 0.05);
  // The two expressions are negations of each other.
  auto p = plus->expression.terms();
  auto m = minus->expression.terms();
  REQUIRE(p.size() == m.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(p[i].first == m[i].first);
    CHECK(p[i].second == -m[i].second);
  }
}

TEST_CASE("A3 prefers cells closer to the truth") {
  ResponseSpace space = pt::space_of(pt::single_proxy_graph(3, 3));
  ObservedData data{{1.0}, {{0.5, 0.3, 0.2}}};
  auto cs = compile_measurement(space, data, MeasurementKind::A3, {});
  // mass(0,1) >= mass(0,2) appears with relation >= and rhs 0.
  const auto* c = find_label(cs, "A3[observed,x=0,y=1,y'=2]");
  REQUIRE(c != nullptr);
  CHECK(c->relation == Relation::ge);
  CHECK(c->rhs == 0.0);
}

TEST_CASE("A4/A5 zero out non-monotone profiles") {
  ResponseSpace space = pt::space_of(pt::trial_graph());
  CausalParams a4;
  a4.treatment_variable = "A";
  a4.outcome_variable = "X";
  auto cs = compile_causal(space, CausalKind::A4, a4);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].relation == Relation::eq);
  CHECK(cs[0].expression.term_count() == 4);  // x~ = (1, 0), any y profile

  CausalParams a5;
  a5.truth_variable = "X";
  a5.proxy_variable = "Y";
  auto cs5 = compile_causal(space, CausalKind::A5, a5);
  REQUIRE(cs5.size() == 1);
  CHECK(cs5[0].expression.term_count() == 4);  // y~ = (1, 0), any x profile
}

TEST_CASE("slack one is as good as no constraint") {
  ResponseSpace space = pt::space_of(pt::trial_graph());
  ObservedData data{{0.5, 0.5}, {{0.6, 0.4}, {0.4, 0.6}}};
  auto base = compile_probability(space);
  auto obs = compile_observed(space, data);
  base.insert(base.end(), obs.begin(), obs.end());

  TargetSpec target;
  target.kind = TargetKind::pmf;
  target.variable = "X";
  target.value = 1;
  auto objective = build_target(space, data, target);
  auto without = solve_bounds(space.atom_count(), base, objective);

  CausalParams a4;
  a4.treatment_variable = "A";
  a4.outcome_variable = "X";
  a4.slack = 1.0;
  auto with = base;
  auto cs = compile_causal(space, CausalKind::A4, a4);
  with.insert(with.end(), cs.begin(), cs.end());
  auto bounded = solve_bounds(space.atom_count(), with, objective);
  CHECK(bounded.lower == doctest::Approx(without.lower).epsilon(1e-9));
  CHECK(bounded.upper == doctest::Approx(without.upper).epsilon(1e-9));
}

TEST_CASE("exact A0 pins the latent variable to the proxy") {
  ResponseSpace space = pt::space_of(pt::single_proxy_graph(6, 6));
  std::vector<double> p{0.3, 0.25, 0.2, 0.1, 0.1, 0.05};
  ObservedData data{{1.0}, {p}};
  auto cs = compile_probability(space);
  auto obs = compile_observed(space, data);
  cs.insert(cs.end(), obs.begin(), obs.end());
  MeasurementParams params;  // epsilon 0, threshold 0
  auto a0 = compile_measurement(space, data, MeasurementKind::A0, params);
  cs.insert(cs.end(), a0.begin(), a0.end());

  TargetSpec target;
  target.kind = TargetKind::moment;
  target.variable = "X";
  auto bounds = solve_bounds(space.atom_count(), cs, build_target(space, data, target));
  double ey = 0.0;
  for (int y = 0; y < 6; ++y) ey += y * p[y];
  CHECK(bounds.status == SolveStatus::optimal);
  CHECK(bounds.lower == doctest::Approx(ey).epsilon(1e-9));
  CHECK(bounds.upper == doctest::Approx(ey).epsilon(1e-9));
}

TEST_CASE("adding constraints never widens bounds") {
  ResponseSpace space = pt::space_of(pt::single_proxy_graph(4, 4));
  std::mt19937_64 rng(7);
  auto psi = pt::random_distribution(rng, space.atom_count());
  auto data = pt::data_from_psi(space, psi, {1.0});

  auto base = compile_probability(space);
  auto obs = compile_observed(space, data);
  base.insert(base.end(), obs.begin(), obs.end());
  TargetSpec target;
  target.kind = TargetKind::moment;
  target.variable = "X";
  auto objective = build_target(space, data, target);
  auto wide = solve_bounds(space.atom_count(), base, objective);

  MeasurementParams params;
  params.epsilon = 0.8;
  auto a0 = compile_measurement(space, data, MeasurementKind::A0, params);
  base.insert(base.end(), a0.begin(), a0.end());
  auto narrow = solve_bounds(space.atom_count(), base, objective);
  REQUIRE(narrow.status == SolveStatus::optimal);
  CHECK(narrow.lower >= wide.lower - 1e-9);
  CHECK(narrow.upper <= wide.upper + 1e-9);
}
