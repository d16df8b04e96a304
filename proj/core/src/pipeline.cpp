#include "pidbounds/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

namespace pidbounds {

namespace {

std::size_t mixed_radix_index(const NetworkSpec& net, const std::vector<std::string>& order,
                              const std::map<std::string, int>& values) {
  std::size_t idx = 0;
  for (const auto& name : order) idx = idx * net.variable(name).cardinality + values.at(name);
  return idx;
}

void check_same_set(const std::vector<std::string>& file_order,
                    const std::vector<std::string>& graph_order, const char* what) {
  std::set<std::string> a(file_order.begin(), file_order.end());
  std::set<std::string> b(graph_order.begin(), graph_order.end());
  if (a != b)
    throw std::invalid_argument(std::string("observed ") + what +
                                " do not match the graph's " + what);
}

void set_parameter(AssumptionSpec& a, const std::string& field, double value) {
  if (field == "epsilon")
    a.measurement.epsilon = value;
  else if (field == "lambda")
    a.measurement.lambda = value;
  else if (field == "threshold")
    a.measurement.distance_threshold = static_cast<int>(std::llround(value));
  else if (field == "slack") {
    a.measurement.slack = value;
    a.causal.slack = value;
  } else
    throw std::invalid_argument("unknown sweep parameter field '" + field + "'");
}

struct SweepPoint {
  std::string label;
  std::vector<AssumptionSpec> assumptions;
  std::string parameter;
  double parameter_value = 0.0;
  bool has_parameter = false;
};

std::string subset_label(const std::vector<AssumptionSpec>& assumptions) {
  if (assumptions.empty()) return "graph";
  std::string label;
  for (const auto& a : assumptions) {
    if (!label.empty()) label += "+";
    label += a.kind;
  }
  return label;
}

std::vector<SweepPoint> expand_plan(const ModelFile& model) {
  std::vector<std::vector<AssumptionSpec>> sets;
  if (model.sweep.subsets.empty()) {
    sets.push_back(model.assumptions);
  } else {
    for (const auto& kinds : model.sweep.subsets) {
      std::vector<AssumptionSpec> subset;
      for (const auto& a : model.assumptions)
        if (std::find(kinds.begin(), kinds.end(), a.kind) != kinds.end()) subset.push_back(a);
      sets.push_back(std::move(subset));
    }
  }

  std::vector<SweepPoint> points;
  for (auto& set : sets) {
    if (model.sweep.values.empty()) {
      points.push_back({subset_label(set), set, "", 0.0, false});
      continue;
    }
    const auto dot = model.sweep.parameter.find('.');
    const std::string kind = model.sweep.parameter.substr(0, dot);
    const std::string field = model.sweep.parameter.substr(dot + 1);
    for (double v : model.sweep.values) {
      auto configured = set;
      for (auto& a : configured)
        if (a.kind == kind) set_parameter(a, field, v);
      points.push_back({subset_label(configured), std::move(configured),
                        model.sweep.parameter, v, true});
    }
  }
  return points;
}

}  // namespace

CompiledProblem compile_problem(const ModelFile& model,
                                const std::optional<std::vector<AssumptionSpec>>& assumptions,
                                std::size_t atom_cap) {
  NetworkSpec net = model.network.validated() ? model.network : validate_network(model.network);

  std::set<std::string> protected_vars;
  if (model.target.interventional()) protected_vars.insert(model.target.intervention_variable);
  // Declared outcomes must keep their role; a rewrite may not turn one
  // into an instrument.
  protected_vars.insert(model.observed.outcomes.begin(), model.observed.outcomes.end());

  auto [fine_net, report] = relax_to_linear(net, protected_vars);
  auto fine = check_fine_conditions(fine_net);
  if (std::holds_alternative<FineReport>(fine))
    throw std::logic_error("relaxed network is not Fine-class: " +
                           std::get<FineReport>(fine).summary());

  CompiledProblem problem;
  problem.network = fine_net;
  problem.witness = std::get<FineWitness>(fine);
  problem.relaxation = std::move(report);
  problem.outer = problem.relaxation.outer();
  problem.space = enumerate_response_space(fine_net, problem.witness, atom_cap);
  const ResponseSpace& space = problem.space;

  // Bind the file's tables (written in the file's variable orders) to the
  // space's arm/outcome indexing.
  check_same_set(model.observed.instruments, problem.witness.instruments, "instruments");
  const auto out_slots = observed_child_slots(space);
  std::vector<std::string> graph_outcomes;
  for (auto s : out_slots) graph_outcomes.push_back(space.slot_name(s));
  check_same_set(model.observed.outcomes, graph_outcomes, "outcomes");

  const std::size_t arms = space.arm_count();
  const std::size_t outcomes = observed_outcome_count(space);
  if (model.observed.marginal.size() != arms)
    throw std::invalid_argument("observed.marginal has the wrong length");

  std::vector<double> marginal(arms);
  std::vector<std::vector<double>> conditionals(arms);
  for (std::size_t arm = 0; arm < arms; ++arm) {
    const auto vals = space.arm_values(arm);
    std::map<std::string, int> by_name;
    for (std::size_t i = 0; i < vals.size(); ++i) by_name[problem.witness.instruments[i]] = vals[i];
    const std::size_t file_arm = mixed_radix_index(fine_net, model.observed.instruments, by_name);
    marginal[arm] = model.observed.marginal.at(file_arm);

    const auto& table = model.observed.conditionals.at(file_arm);
    if (table.empty()) continue;
    if (table.size() != outcomes)
      throw std::invalid_argument("observed.conditionals[" + std::to_string(file_arm) +
                                  "] has the wrong length");
    conditionals[arm].resize(outcomes);
    for (std::size_t o = 0; o < outcomes; ++o) {
      std::size_t rem = o;
      std::map<std::string, int> outcome_vals;
      for (std::size_t i = out_slots.size(); i-- > 0;) {
        const int card = space.cardinality(out_slots[i]);
        outcome_vals[space.slot_name(out_slots[i])] = static_cast<int>(rem % card);
        rem /= card;
      }
      conditionals[arm][o] =
          table.at(mixed_radix_index(fine_net, model.observed.outcomes, outcome_vals));
    }
  }
  problem.data = ObservedData::validated(space, std::move(marginal), std::move(conditionals));

  problem.constraints = compile_probability(space, /*include_nonnegativity=*/false);
  auto obs = compile_observed(space, problem.data);
  problem.constraints.insert(problem.constraints.end(), obs.begin(), obs.end());
  const auto& active = assumptions ? *assumptions : model.assumptions;
  for (const auto& a : active) {
    auto cs = compile_assumption(space, problem.data, a);
    problem.constraints.insert(problem.constraints.end(), cs.begin(), cs.end());
  }
  problem.objective = build_target(space, problem.data, model.target);
  return problem;
}

Bounds solve_problem(const CompiledProblem& problem) {
  return solve_bounds(problem.space.atom_count(), problem.constraints, problem.objective);
}

std::vector<RunRecord> run_sweep(const ModelFile& model, const RunOptions& options) {
  const auto points = expand_plan(model);
  std::vector<RunRecord> records(points.size());

  auto solve_point = [&](std::size_t i) {
    const auto& point = points[i];
    RunRecord& rec = records[i];
    rec.label = point.label;
    rec.parameter = point.parameter;
    rec.parameter_value = point.parameter_value;
    rec.has_parameter = point.has_parameter;

    const auto start = std::chrono::steady_clock::now();
    CompiledProblem problem = compile_problem(model, point.assumptions);
    if (!options.dump_lp_path.empty()) {
      std::string path = options.dump_lp_path;
      if (points.size() > 1) path += "." + std::to_string(i);
      std::ofstream out(path);
      LinearProgram lp{problem.objective, problem.constraints, problem.space.atom_count(),
                       Sense::minimize};
      dump_lp(out, lp);
    }
    Bounds bounds = solve_problem(problem);
    rec.runtime_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    rec.status = bounds.status;
    rec.outer = problem.outer;
    rec.lower = bounds.lower;
    rec.upper = bounds.upper;
    rec.iterations_lower = bounds.diagnostics.iterations_lower;
    rec.iterations_upper = bounds.diagnostics.iterations_upper;
    rec.infeasible_labels = bounds.diagnostics.infeasible_labels;
    rec.lower_witness = bounds.lower_witness;
    rec.upper_witness = bounds.upper_witness;

    if (options.verify_oracle && bounds.status == SolveStatus::optimal) {
      LinearProgram lp{problem.objective, problem.constraints, problem.space.atom_count(),
                       Sense::minimize};
      Bounds reference = oracle_bounds(lp);
      rec.oracle_agrees = reference.status == SolveStatus::optimal &&
                          std::abs(reference.lower - bounds.lower) <= 1e-6 &&
                          std::abs(reference.upper - bounds.upper) <= 1e-6;
    }
  };

  const int jobs = std::max(1, options.jobs);
  if (jobs == 1 || points.size() <= 1) {
    for (std::size_t i = 0; i < points.size(); ++i) solve_point(i);
    return records;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  const std::size_t n_workers = std::min<std::size_t>(jobs, points.size());
  for (std::size_t w = 0; w < n_workers; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < points.size(); i = next.fetch_add(1)) {
        try {
          solve_point(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
  return records;
}

}  // namespace pidbounds
