#pragma once

#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace pidbounds {

enum class Role { observed, latent_target, exogenous };

const char* to_string(Role r);
Role role_from_string(const std::string& s);

struct VariableSpec {
  std::string name;
  int cardinality = 0;  // unused for exogenous variables
  Role role = Role::observed;
};

/// A latent-variable DAG. Endogenous variables (observed / latent-target)
/// carry a cardinality; exogenous confounders do not and may have no parents.
struct NetworkSpec {
  std::vector<VariableSpec> variables;
  std::vector<std::pair<std::string, std::string>> edges;

  // Filled in by validate_network.
  std::vector<std::string> topological_order;

  bool has_variable(const std::string& name) const;
  const VariableSpec& variable(const std::string& name) const;
  std::vector<std::string> parents(const std::string& name) const;
  std::vector<std::string> children(const std::string& name) const;
  std::vector<std::string> endogenous_parents(const std::string& name) const;
  bool has_edge(const std::string& a, const std::string& b) const;
  bool validated() const { return !topological_order.empty() || variables.empty(); }
};

/// Certificate that a network is in the Fine class: a single mutual
/// confounder `lambda`, its children, and the instruments (all remaining
/// vertices). `lambda` is empty only in the degenerate fully-disconnected
/// case.
struct FineWitness {
  std::string lambda;
  std::vector<std::string> children;
  std::vector<std::string> instruments;
};

struct FineFailure {
  std::string candidate;  // exogenous vertex tried as lambda
  std::string vertex;     // where the condition failed
  std::string reason;
};

struct FineReport {
  std::vector<FineFailure> failures;
  std::string summary() const;
};

struct GraphRewrite {
  enum class Kind { edge_added, edge_removed, variable_removed, variable_added };
  Kind kind;
  std::string a;  // edge tail / variable name
  std::string b;  // edge head (edges only)
  int step = 0;   // 1 = confounded-instrument reduction, 2 = confounder merge
};

struct RelaxationReport {
  std::vector<GraphRewrite> rewrites;

  /// True when the result is only an outer relaxation (step-2 rewrites
  /// happened); step-1 rewrites alone preserve the model exactly.
  bool outer() const;
};

/// Checks name uniqueness, DAG-ness, role/cardinality rules and caches a
/// topological order. Throws std::invalid_argument on violation.
NetworkSpec validate_network(NetworkSpec spec);

/// Tests membership in the Fine-linear class: an exogenous vertex whose
/// descendants are all its children, every other vertex observed with
/// exactly one child among those children. Candidates are tried in
/// declaration order; failure is a value, not an error.
std::variant<FineWitness, FineReport> check_fine_conditions(const NetworkSpec& spec);

/// Repeatedly removes an exogenous confounder U with exactly two children
/// A, B where Pa(A) = {U} and Ch(A) is empty or {B}, adding the edge A->B.
/// The observed-data model is unchanged by each rewrite. Reductions whose A
/// is in `protected_vars` are skipped (interventional targets on A would
/// change under the rewrite).
NetworkSpec apply_confounder_reductions(NetworkSpec spec,
                                   const std::set<std::string>& protected_vars = {});

/// Linear relaxation: confounded-instrument reductions first, then every
/// surviving exogenous confounder is replaced by a single fresh confounder
/// with an edge to each vertex that has parents. The result is in the Fine
/// class or std::invalid_argument is thrown naming the offending vertex.
std::pair<NetworkSpec, RelaxationReport> relax_to_linear(
    const NetworkSpec& spec, const std::set<std::string>& protected_vars = {});

}  // namespace pidbounds
