#include <map>

#include "doctest.h"
#include "helpers.hpp"
#include "pidbounds/targets.hpp"

using namespace pidbounds;
namespace pt = pidbounds::testing;

namespace {

ObservedData iv_data() {
  return {{0.5, 0.5}, {{0.25, 0.25, 0.25, 0.25}, {0.25, 0.25, 0.25, 0.25}}};
}

std::map<std::size_t, double> coeff_map(const LinearExpression& e) {
  std::map<std::size_t, double> out;
  for (const auto& [i, v] : e.terms()) out[i] = v;
  return out;
}

}  // namespace

TEST_CASE("ATE coefficients are the signed profile differences") {
  ResponseSpace space = pt::space_of(pt::iv_graph());
  TargetSpec target;
  target.kind = TargetKind::ate;
  target.variable = "X";
  target.intervention_variable = "A";
  auto e = build_target(space, iv_data(), target);
  auto coeffs = coeff_map(e);
  int plus = 0, minus = 0;
  for (std::size_t atom = 0; atom < space.atom_count(); ++atom) {
    const auto profiles = space.decode(atom);
    const int x0 = space.profile_value(0, profiles[0], 0);
    const int x1 = space.profile_value(0, profiles[0], 1);
    const double expected = x1 - x0;
    const double actual = coeffs.count(atom) ? coeffs[atom] : 0.0;
    CHECK(actual == expected);
    if (expected > 0) ++plus;
    if (expected < 0) ++minus;
  }
  CHECK(plus == 4);
  CHECK(minus == 4);
}

TEST_CASE("point mass on x~ = (3, 3) evaluates E[X] to 3") {
  ResponseSpace space = pt::space_of(pt::trial_graph(6, 6));
  ObservedData data{{0.25, 0.75}, {std::vector<double>(6, 1.0 / 6),
                                   std::vector<double>(6, 1.0 / 6)}};
  TargetSpec target;
  target.kind = TargetKind::moment;
  target.variable = "X";
  auto e = build_target(space, data, target);

  std::vector<double> psi(space.atom_count(), 0.0);
  // X profile with value 3 at both arms; any Y profile.
  std::size_t profiles[2] = {3 * 6 + 3, 0};
  psi[space.encode(profiles)] = 1.0;
  CHECK(e.evaluate(psi) == doctest::Approx(3.0));
}

TEST_CASE("prob_nonzero_effect selects atoms with differing potentials") {
  ResponseSpace space = pt::space_of(pt::iv_graph());
  TargetSpec target;
  target.kind = TargetKind::prob_nonzero_effect;
  target.variable = "X";
  target.intervention_variable = "A";
  auto e = build_target(space, iv_data(), target);
  CHECK(e.term_count() == 8);
  for (const auto& [atom, coeff] : e.terms()) CHECK(coeff == 1.0);
}

TEST_CASE("ATE antisymmetry") {
  ResponseSpace space = pt::space_of(pt::iv_graph());
  TargetSpec fwd;
  fwd.kind = TargetKind::ate;
  fwd.variable = "Y";
  fwd.intervention_variable = "X";
  TargetSpec rev = fwd;
  rev.t = 0;
  rev.t_prime = 1;
  auto ef = coeff_map(build_target(space, iv_data(), fwd));
  auto er = coeff_map(build_target(space, iv_data(), rev));
  CHECK(ef.size() == er.size());
  for (const auto& [atom, v] : ef) CHECK(er[atom] == -v);
}

TEST_CASE("ATE decomposes into interventional pmfs") {
  ResponseSpace space = pt::space_of(pt::iv_graph());
  TargetSpec ate;
  ate.kind = TargetKind::ate;
  ate.variable = "Y";
  ate.intervention_variable = "X";
  auto direct = coeff_map(build_target(space, iv_data(), ate));

  LinearExpression combined;
  for (int x = 0; x < 2; ++x) {
    TargetSpec pmf;
    pmf.kind = TargetKind::interventional_pmf;
    pmf.variable = "Y";
    pmf.intervention_variable = "X";
    pmf.value = x;
    pmf.t = 1;
    combined.add_scaled(build_target(space, iv_data(), pmf), x);
    pmf.t = 0;
    combined.add_scaled(build_target(space, iv_data(), pmf), -x);
  }
  auto decomposed = coeff_map(combined);
  for (std::size_t atom = 0; atom < space.atom_count(); ++atom) {
    const double a = direct.count(atom) ? direct[atom] : 0.0;
    const double b = decomposed.count(atom) ? decomposed[atom] : 0.0;
    CHECK(a == doctest::Approx(b));
  }
}

TEST_CASE("zeroth moment is the all-ones expression") {
  ResponseSpace space = pt::space_of(pt::iv_graph());
  TargetSpec target;
  target.kind = TargetKind::moment;
  target.variable = "X";
  target.moment_order = 0;
  auto e = build_target(space, iv_data(), target);
  CHECK(e.term_count() == 16);
  for (const auto& [atom, coeff] : e.terms()) CHECK(coeff == doctest::Approx(1.0));
}

TEST_CASE("target validation") {
  ResponseSpace space = pt::space_of(pt::iv_graph());
  TargetSpec bad;
  bad.kind = TargetKind::ate;
  bad.variable = "Y";
  bad.intervention_variable = "X";
  bad.t = 5;
  CHECK_THROWS_AS(build_target(space, iv_data(), bad), std::invalid_argument);
  CHECK(target_kind_from_string("mean") == TargetKind::moment);
  CHECK_THROWS_AS(target_kind_from_string("median"), std::invalid_argument);
}
