#include <map>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "pidbounds/response.hpp"

using namespace pidbounds;
namespace pt = pidbounds::testing;

TEST_CASE("atom counts") {
  CHECK(pt::space_of(pt::iv_graph()).atom_count() == 16);
  // Relaxed chain with |A|=2, |X|=3, |Y|=3: 3^2 * 3^3.
  auto [relaxed, report] = relax_to_linear(pt::chain_graph(3, 3));
  CHECK(pt::space_of(relaxed).atom_count() == 243);

  NetworkSpec two;
  two.variables = {{"A", 2, Role::observed}, {"B", 2, Role::observed},
                   {"X", 2, Role::observed}, {"Y", 2, Role::observed},
                   {"L", 0, Role::exogenous}};
  two.edges = {{"A", "X"}, {"B", "Y"}, {"X", "Y"}, {"L", "X"}, {"L", "Y"}};
  CHECK(pt::space_of(validate_network(two)).atom_count() == 64);
}

TEST_CASE("atom cap raises 'problem too large'") {
  CHECK_THROWS_WITH_AS(
      enumerate_response_space(
          pt::iv_graph(),
          std::get<FineWitness>(check_fine_conditions(pt::iv_graph())), 8),
      doctest::Contains("too large"), std::invalid_argument);
}

TEST_CASE("codec round-trips") {
  ResponseSpace space = pt::space_of(pt::iv_graph());
  for (std::size_t atom = 0; atom < space.atom_count(); ++atom) {
    auto profiles = space.decode(atom);
    CHECK(space.encode(profiles) == atom);
  }
}

namespace {

/// Atom of the binary IV space with profiles x~ = (x0, x1), y~ = (y0, y1).
std::size_t iv_atom(const ResponseSpace& space, int x0, int x1, int y0, int y1) {
  std::size_t profiles[2] = {static_cast<std::size_t>(2 * x0 + x1),
                             static_cast<std::size_t>(2 * y0 + y1)};
  return space.encode(profiles);
}

}  // namespace

TEST_CASE("propagation reads profiles at realized parent values") {
  ResponseSpace space = pt::space_of(pt::iv_graph());
  Propagator prop(space);
  const std::size_t atom = iv_atom(space, 1, 0, 0, 1);
  const std::size_t sx = space.slot("X"), sy = space.slot("Y");

  int arm0[] = {0};
  auto values = prop.run(atom, arm0);
  CHECK(values[sx] == 1);
  CHECK(values[sy] == 1);  // y~ at X=1

  auto do_x0 = prop.run(atom, arm0, make_intervention(space, {{"X", 0}}));
  CHECK(do_x0[sx] == 0);
  CHECK(do_x0[sy] == 0);

  auto do_a1 = prop.run(atom, arm0, make_intervention(space, {{"A", 1}}));
  CHECK(do_a1[space.slot("A")] == 1);
  CHECK(do_a1[sx] == 0);  // x~ at A=1
  CHECK(do_a1[sy] == 0);  // y~ at X=0
}

TEST_CASE("intervening on an exogenous variable is rejected") {
  ResponseSpace space = pt::space_of(pt::iv_graph());
  CHECK_THROWS_AS(make_intervention(space, {{"L", 0}}), std::invalid_argument);
  CHECK_THROWS_AS(make_intervention(space, {{"X", 7}}), std::invalid_argument);
}

TEST_CASE("event expressions select the right atom counts") {
  ResponseSpace space = pt::space_of(pt::iv_graph());
  const std::size_t sx = space.slot("X"), sy = space.slot("Y");
  int arm0[] = {0};

  auto e = event_expression(space, arm0, {}, [&](std::span<const int> v) {
    return v[sx] == 1 && v[sy] == 0;
  });
  CHECK(e.term_count() == 4);

  auto all = event_expression(space, arm0, {}, [](std::span<const int>) { return true; });
  CHECK(all.term_count() == 16);

  auto do_x1 = event_expression(space, arm0, make_intervention(space, {{"X", 1}}),
                                [&](std::span<const int> v) { return v[sy] == 1; });
  CHECK(do_x1.term_count() == 8);
}

TEST_CASE("event expressions over joint assignments partition the atoms") {
  ResponseSpace space = pt::space_of(pt::iv_graph());
  const std::size_t sx = space.slot("X"), sy = space.slot("Y");
  int arm1[] = {1};
  std::map<std::size_t, int> seen;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      auto e = event_expression(space, arm1, {}, [&](std::span<const int> v) {
        return v[sx] == x && v[sy] == y;
      });
      for (const auto& [atom, coeff] : e.terms()) {
        CHECK(coeff == 1.0);
        seen[atom]++;
      }
    }
  CHECK(seen.size() == 16);
  for (const auto& [atom, count] : seen) CHECK(count == 1);
}

TEST_CASE("interventional marginal equals the direct profile marginal") {
  // P(X(a) = x) selects exactly the atoms whose x~ digit at a equals x.
  ResponseSpace space = pt::space_of(pt::iv_graph());
  const std::size_t sx = space.slot("X");
  int arm0[] = {0};
  for (int a = 0; a < 2; ++a)
    for (int x = 0; x < 2; ++x) {
      auto via_do = event_expression(space, arm0, make_intervention(space, {{"A", a}}),
                                     [&](std::span<const int> v) { return v[sx] == x; });
      std::set<std::size_t> direct;
      for (std::size_t atom = 0; atom < 16; ++atom)
        if (space.profile_value(0, space.decode(atom)[0], a) == x) direct.insert(atom);
      std::set<std::size_t> via;
      for (const auto& [atom, coeff] : via_do.terms()) via.insert(atom);
      CHECK(via == direct);
    }
}
