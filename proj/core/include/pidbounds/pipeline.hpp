#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pidbounds/constraints.hpp"
#include "pidbounds/network.hpp"
#include "pidbounds/oracle.hpp"
#include "pidbounds/response.hpp"
#include "pidbounds/simplex.hpp"
#include "pidbounds/spec_file.hpp"
#include "pidbounds/targets.hpp"

namespace pidbounds {

/// A model compiled down to an LP-ready form. The network has been taken
/// through confounded-instrument reductions and, when necessary, the linear
/// relaxation; `outer` is set when bounds are outer rather than sharp.
struct CompiledProblem {
  NetworkSpec network;  // the Fine-class graph actually used
  FineWitness witness;
  ResponseSpace space;
  ObservedData data;
  std::vector<LinearConstraint> constraints;
  LinearExpression objective;
  RelaxationReport relaxation;
  bool outer = false;
};

/// Validates, rewrites the graph into the Fine class, binds the observed
/// tables to the witness's variable orders and compiles constraints for the
/// given assumption subset (nullopt = all assumptions in the file).
CompiledProblem compile_problem(
    const ModelFile& model,
    const std::optional<std::vector<AssumptionSpec>>& assumptions = std::nullopt,
    std::size_t atom_cap = 10'000'000);

Bounds solve_problem(const CompiledProblem& problem);

struct RunOptions {
  bool verify_oracle = false;
  int jobs = 1;
  std::string dump_lp_path;  // empty = no dump
};

struct RunRecord {
  std::string label;          // assumption subset, "graph" when empty
  std::string parameter;      // swept parameter path, if any
  double parameter_value = 0.0;
  bool has_parameter = false;
  double lower = 0.0;
  double upper = 0.0;
  SolveStatus status = SolveStatus::optimal;
  bool outer = false;
  double runtime_ms = 0.0;
  int iterations_lower = 0;
  int iterations_upper = 0;
  std::optional<bool> oracle_agrees;
  std::vector<std::pair<std::string, double>> infeasible_labels;
  std::vector<double> lower_witness;
  std::vector<double> upper_witness;
};

/// Executes the sweep plan (default: the single configured assumption set),
/// one record per point, in deterministic plan order. Infeasible solves are
/// records, not errors.
std::vector<RunRecord> run_sweep(const ModelFile& model, const RunOptions& options = {});

}  // namespace pidbounds
