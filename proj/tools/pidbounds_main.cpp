// pidbounds: bounds on partially identified discrete targets.
//
//   pidbounds solve <spec>   compile and solve the bounds problem / sweep
//   pidbounds check-graph <spec>   Fine classification and relaxation report
//   pidbounds prop3 <spec>   analytic bounds for a binary proxy target

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pidbounds/analytic.hpp"
#include "pidbounds/pipeline.hpp"
#include "pidbounds/spec_file.hpp"

namespace {

using nlohmann::json;
using namespace pidbounds;

json record_to_json(const RunRecord& rec) {
  json j;
  j["label"] = rec.label;
  if (rec.has_parameter) {
    j["parameter"] = rec.parameter;
    j["value"] = rec.parameter_value;
  }
  j["status"] = to_string(rec.status);
  if (rec.status == SolveStatus::optimal) {
    j["lower"] = rec.lower;
    j["upper"] = rec.upper;
  }
  j["outer"] = rec.outer;
  j["runtime_ms"] = rec.runtime_ms;
  j["iterations"] = {{"lower", rec.iterations_lower}, {"upper", rec.iterations_upper}};
  if (rec.oracle_agrees) j["oracle_agrees"] = *rec.oracle_agrees;
  if (!rec.infeasible_labels.empty()) {
    json blockers = json::array();
    for (const auto& [label, residual] : rec.infeasible_labels)
      blockers.push_back({{"constraint", label}, {"residual", residual}});
    j["infeasible_constraints"] = blockers;
  }
  return j;
}

void print_csv(const std::vector<RunRecord>& records) {
  std::cout << "subset,param,lower,upper,status\n";
  for (const auto& rec : records) {
    std::cout << rec.label << ",";
    if (rec.has_parameter) std::cout << rec.parameter << "=" << rec.parameter_value;
    std::cout << "," << rec.lower << "," << rec.upper << "," << to_string(rec.status) << "\n";
  }
}

int cmd_solve(const std::string& path, const std::string& verify, const std::string& witnesses,
              int jobs, const std::string& dump_lp, const std::string& format) {
  ModelFile model = parse_spec(path);
  RunOptions options;
  options.verify_oracle = verify == "oracle";
  options.jobs = jobs;
  options.dump_lp_path = dump_lp;
  auto records = run_sweep(model, options);

  std::cout << std::setprecision(12);
  if (format == "csv") {
    print_csv(records);
  } else {
    for (const auto& rec : records) std::cout << record_to_json(rec).dump() << "\n";
  }

  if (!witnesses.empty()) {
    json out = json::array();
    for (const auto& rec : records)
      out.push_back({{"label", rec.label},
                     {"lower_witness", rec.lower_witness},
                     {"upper_witness", rec.upper_witness}});
    std::ofstream f(witnesses);
    f << out.dump(2) << "\n";
  }
  return 0;  // infeasible points are reported results, not failures
}

int cmd_check_graph(const std::string& path) {
  ModelFile model = parse_spec(path);
  auto fine = check_fine_conditions(model.network);
  if (const auto* witness = std::get_if<FineWitness>(&fine)) {
    std::cout << "Fine class: yes\n";
    std::cout << "confounder: " << (witness->lambda.empty() ? "(none)" : witness->lambda)
              << "\n";
    std::cout << "children:";
    for (const auto& c : witness->children) std::cout << " " << c;
    std::cout << "\ninstruments:";
    for (const auto& c : witness->instruments) std::cout << " " << c;
    std::cout << "\n";
    return 0;
  }
  std::cout << "Fine class: no\n" << std::get<FineReport>(fine).summary() << "\n";

  std::set<std::string> protected_vars;
  if (model.target.interventional()) protected_vars.insert(model.target.intervention_variable);
  auto [relaxed, report] = relax_to_linear(model.network, protected_vars);
  std::cout << "relaxation (" << (report.outer() ? "outer bounds" : "exact") << "):\n";
  for (const auto& rw : report.rewrites) {
    const char* kind = rw.kind == GraphRewrite::Kind::edge_added      ? "add edge"
                       : rw.kind == GraphRewrite::Kind::edge_removed  ? "remove edge"
                       : rw.kind == GraphRewrite::Kind::variable_added ? "add variable"
                                                                        : "remove variable";
    std::cout << "  step " << rw.step << ": " << kind << " " << rw.a;
    if (!rw.b.empty()) std::cout << " -> " << rw.b;
    std::cout << "\n";
  }
  return 0;
}

void print_union(const char* name, const IntervalUnion& u) {
  std::cout << name << ":";
  for (const auto& iv : u.intervals) std::cout << " [" << iv.lo << ", " << iv.hi << "]";
  if (u.intervals.empty()) std::cout << " (empty)";
  std::cout << "\n";
  for (const auto& note : u.notes) std::cout << "  note: " << note << "\n";
}

int cmd_prop3(const std::string& path, const std::string& variant) {
  ModelFile model = parse_spec(path);
  if (model.observed.outcomes.size() != 1 ||
      model.network.variable(model.observed.outcomes[0]).cardinality != 2)
    throw std::invalid_argument("prop3 needs a single binary observed outcome");

  const std::size_t arms = model.observed.marginal.size();
  std::vector<double> p_y(2, 0.0);
  std::vector<std::vector<double>> p_y_given_a(arms);
  for (std::size_t a = 0; a < arms; ++a) {
    p_y_given_a[a] = model.observed.conditionals[a];
    for (int y = 0; y < 2; ++y)
      p_y[y] += model.observed.marginal[a] * p_y_given_a[a][y];
  }

  std::cout << std::setprecision(12);
  if (variant.empty()) {
    print_union("bounds", prop3_bounds(p_y, p_y_given_a));
  } else {
    print_union("bounds",
                prop3_corollary_bounds(prop3_variant_from_string(variant), p_y, p_y_given_a));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bounds for partially identified discrete targets"};
  app.require_subcommand(1);

  std::string spec_path, verify, witnesses, dump_lp, variant;
  std::string format = "ndjson";
  int jobs = 1;

  auto* solve = app.add_subcommand("solve", "solve the bounds problem / sweep");
  solve->add_option("spec", spec_path, "model-spec file")->required();
  solve->add_option("--verify", verify, "cross-check small solves ('oracle')")
      ->check(CLI::IsMember({"oracle"}));
  solve->add_option("--witnesses", witnesses, "write witness distributions to this file");
  solve->add_option("--jobs", jobs, "parallel sweep solves")->check(CLI::PositiveNumber);
  solve->add_option("--dump-lp", dump_lp, "write the compiled LP(s) to this path");
  solve->add_option("--format", format, "output format")
      ->check(CLI::IsMember({"csv", "ndjson"}));

  auto* check = app.add_subcommand("check-graph", "Fine classification + relaxation report");
  check->add_option("spec", spec_path, "model-spec file")->required();

  auto* prop3 = app.add_subcommand("prop3", "analytic bounds for a binary proxy target");
  prop3->add_option("spec", spec_path, "model-spec file")->required();
  prop3->add_option("--variant", variant, "restricted variant")
      ->check(CLI::IsMember({"A1", "A3", "label_independent"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(spec_path, verify, witnesses, jobs, dump_lp, format);
    if (check->parsed()) return cmd_check_graph(spec_path);
    return cmd_prop3(spec_path, variant);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
