#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "pidbounds/analytic.hpp"
#include "pidbounds/pipeline.hpp"

using namespace pidbounds;
namespace pt = pidbounds::testing;

TEST_CASE("compile binds file tables regardless of declaration order") {
  // Swapped outcome order in the file must yield the same bounds.
  ModelFile base = parse_spec(pt::model_path("iv_binary.json"));
  ModelFile swapped = base;
  swapped.observed.outcomes = {"Y", "X"};
  for (auto& table : swapped.observed.conditionals) {
    // index y*2 + x instead of x*2 + y
    auto t = table;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) table[y * 2 + x] = t[x * 2 + y];
  }
  auto a = solve_problem(compile_problem(base));
  auto b = solve_problem(compile_problem(swapped));
  CHECK(a.lower == doctest::Approx(b.lower).epsilon(1e-9));
  CHECK(a.upper == doctest::Approx(b.upper).epsilon(1e-9));
}

TEST_CASE("non-Fine inputs are relaxed and marked as outer") {
  ModelFile chain = parse_spec(pt::model_path("chain_binary.json"));
  auto problem = compile_problem(chain);
  CHECK(problem.outer);
  auto bounds = solve_problem(problem);
  REQUIRE(bounds.status == SolveStatus::optimal);
  // Outer bounds contain the sharp analytic set.
  std::vector<double> py(2, 0.0);
  for (int a = 0; a < 2; ++a)
    for (int y = 0; y < 2; ++y)
      py[y] += chain.observed.marginal[a] * chain.observed.conditionals[a][y];
  auto sharp = prop3_bounds(py, chain.observed.conditionals);
  CHECK(bounds.lower <= sharp.min() + 1e-9);
  CHECK(bounds.upper >= sharp.max() - 1e-9);
}

TEST_CASE("assumption subsets narrow bounds in sweep order") {
  ModelFile model = parse_spec(pt::model_path("partial_compliance_iv.json"));
  auto records = run_sweep(model);
  REQUIRE(records.size() == 3);
  CHECK(records[0].label == "graph");
  CHECK(records[1].label == "A4");
  CHECK(records[2].label == "A4+A5");
  for (std::size_t i = 1; i < records.size(); ++i) {
    CHECK(records[i].lower >= records[i - 1].lower - 1e-9);
    CHECK(records[i].upper <= records[i - 1].upper + 1e-9);
  }
  CHECK(records[2].lower > 0.0);
  // The generating model's true ATE is 0.4.
  CHECK(records[2].lower <= 0.4 + 1e-9);
  CHECK(records[2].upper >= 0.4 - 1e-9);
}

TEST_CASE("parallel sweeps match the serial records") {
  ModelFile model = parse_spec(pt::model_path("partial_compliance_iv.json"));
  RunOptions serial;
  RunOptions parallel;
  parallel.jobs = 3;
  auto a = run_sweep(model, serial);
  auto b = run_sweep(model, parallel);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].label == b[i].label);
    CHECK(a[i].lower == b[i].lower);
    CHECK(a[i].upper == b[i].upper);
  }
}

TEST_CASE("oracle verification annotates records") {
  ModelFile model = parse_spec(pt::model_path("iv_binary.json"));
  RunOptions options;
  options.verify_oracle = true;
  auto records = run_sweep(model, options);
  REQUIRE(records.size() == 1);
  REQUIRE(records[0].oracle_agrees.has_value());
  CHECK(*records[0].oracle_agrees);
}

TEST_CASE("parameter sweeps produce one record per grid value") {
  ModelFile model = parse_spec(pt::model_path("iv_binary.json"));
  model.assumptions.clear();
  AssumptionSpec a4;
  a4.kind = "A4";
  a4.causal.treatment_variable = "X";
  a4.causal.outcome_variable = "Y";
  model.assumptions.push_back(a4);
  model.sweep.parameter = "A4.slack";
  model.sweep.values = {0.0, 0.05, 0.2, 1.0};
  auto records = run_sweep(model);
  REQUIRE(records.size() == 4);
  for (std::size_t i = 1; i < records.size(); ++i) {
    CHECK(records[i].has_parameter);
    CHECK(records[i].parameter_value == model.sweep.values[i]);
    // Feasible sets grow with slack: nested-increasing intervals.
    CHECK(records[i].lower <= records[i - 1].lower + 1e-9);
    CHECK(records[i].upper >= records[i - 1].upper - 1e-9);
  }
}

TEST_CASE("infeasible assumption sets come back as records") {
  ModelFile model = parse_spec(pt::model_path("iv_binary.json"));
  AssumptionSpec a0;
  a0.kind = "A0";
  a0.measurement.epsilon = 0.0;
  a0.measurement.truth_variable = "X";
  a0.measurement.proxy_variable = "Y";
  model.assumptions.push_back(a0);  // X == Y contradicts the tables
  auto records = run_sweep(model);
  REQUIRE(records.size() == 1);
  CHECK(records[0].status == SolveStatus::infeasible);
  CHECK(!records[0].infeasible_labels.empty());
}
