#include "doctest.h"
#include "helpers.hpp"
#include "pidbounds/spec_file.hpp"

using namespace pidbounds;
namespace pt = pidbounds::testing;

namespace {

const char* kIvSpec = R"({
  "variables": [
    {"name": "A", "cardinality": 2, "role": "observed"},
    {"name": "X", "cardinality": 2, "role": "observed"},
    {"name": "Y", "cardinality": 2, "role": "observed"},
    {"name": "L", "role": "exogenous"}
  ],
  "edges": [["A", "X"], ["X", "Y"], ["L", "X"], ["L", "Y"]],
  "observed": {
    "instruments": ["A"],
    "outcomes": ["X", "Y"],
    "marginal": [0.5, 0.5],
    "conditionals": [[0.25, 0.25, 0.25, 0.25], [0.25, 0.25, 0.25, 0.25]]
  },
  "assumptions": [{"kind": "A4", "treatment": "X", "outcome": "Y", "slack": 0.1}],
  "target": {"kind": "ate", "variable": "Y", "intervention_variable": "X"}
})";

std::string patched(std::string text, const std::string& from, const std::string& to) {
  text.replace(text.find(from), from.size(), to);
  return text;
}

}  // namespace

TEST_CASE("a well-formed IV spec parses and validates") {
  ModelFile model = parse_spec_text(kIvSpec);
  CHECK(model.network.validated());
  CHECK(model.observed.marginal.size() == 2);
  REQUIRE(model.assumptions.size() == 1);
  CHECK(model.assumptions[0].causal.slack == 0.1);
  CHECK(model.target.kind == TargetKind::ate);
  CHECK(model.sweep.empty());
  CHECK(pt::space_of(model.network).atom_count() == 16);
}

TEST_CASE("unnormalized distributions are rejected, not renormalized") {
  auto text = patched(kIvSpec, "[0.25, 0.25, 0.25, 0.25]", "[0.25, 0.25, 0.25, 0.23]");
  CHECK_THROWS_WITH_AS(parse_spec_text(text), doctest::Contains("not normalized"),
                       std::invalid_argument);
}

TEST_CASE("unknown assumption kinds are rejected") {
  auto text = patched(kIvSpec, "\"A4\"", "\"A7\"");
  CHECK_THROWS_WITH_AS(parse_spec_text(text), doctest::Contains("unknown assumption kind"),
                       std::invalid_argument);
}

TEST_CASE("errors carry the offending section") {
  auto text = patched(kIvSpec, "\"marginal\"", "\"marginals\"");
  CHECK_THROWS_WITH_AS(parse_spec_text(text), doctest::Contains("observed"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_spec_text("{nope"), doctest::Contains("<string>"),
                       std::invalid_argument);
}

TEST_CASE("interventional targets require the intervention variable") {
  auto text = patched(kIvSpec, ", \"intervention_variable\": \"X\"", "");
  CHECK_THROWS_WITH_AS(parse_spec_text(text), doctest::Contains("intervention_variable"),
                       std::invalid_argument);
}

TEST_CASE("sweep plans parse with subsets and a parameter grid") {
  auto text = patched(kIvSpec, "\"target\":",
                      "\"sweep\": {\"subsets\": [[], [\"A4\"]],"
                      " \"parameter\": \"A4.slack\", \"values\": [0.0, 0.1]},\n  \"target\":");
  ModelFile model = parse_spec_text(text);
  CHECK(model.sweep.subsets.size() == 2);
  CHECK(model.sweep.parameter == "A4.slack");
  CHECK(model.sweep.values == std::vector<double>{0.0, 0.1});
}

TEST_CASE("shipped model files parse") {
  for (const char* name :
       {"single_proxy_6level.json", "chain_binary.json", "iv_binary.json",
        "randomized_trial_6level.json", "iv_6level_proxy.json", "partial_compliance_iv.json"}) {
    CAPTURE(name);
    CHECK_NOTHROW(parse_spec(pt::model_path(name)));
  }
}
