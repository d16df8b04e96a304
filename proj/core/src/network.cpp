#include "pidbounds/network.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace pidbounds {

const char* to_string(Role r) {
  switch (r) {
    case Role::observed: return "observed";
    case Role::latent_target: return "latent-target";
    default: return "exogenous";
  }
}

Role role_from_string(const std::string& s) {
  if (s == "observed") return Role::observed;
  if (s == "latent-target" || s == "latent_target") return Role::latent_target;
  if (s == "exogenous") return Role::exogenous;
  throw std::invalid_argument("unknown variable role: " + s);
}

bool NetworkSpec::has_variable(const std::string& name) const {
  return std::any_of(variables.begin(), variables.end(),
                     [&](const VariableSpec& v) { return v.name == name; });
}

const VariableSpec& NetworkSpec::variable(const std::string& name) const {
  for (const auto& v : variables)
    if (v.name == name) return v;
  throw std::invalid_argument("unknown variable: " + name);
}

std::vector<std::string> NetworkSpec::parents(const std::string& name) const {
  std::vector<std::string> out;
  for (const auto& [a, b] : edges)
    if (b == name) out.push_back(a);
  return out;
}

std::vector<std::string> NetworkSpec::children(const std::string& name) const {
  std::vector<std::string> out;
  for (const auto& [a, b] : edges)
    if (a == name) out.push_back(b);
  return out;
}

std::vector<std::string> NetworkSpec::endogenous_parents(const std::string& name) const {
  std::vector<std::string> out;
  for (const auto& p : parents(name))
    if (variable(p).role != Role::exogenous) out.push_back(p);
  return out;
}

bool NetworkSpec::has_edge(const std::string& a, const std::string& b) const {
  return std::find(edges.begin(), edges.end(), std::make_pair(a, b)) != edges.end();
}

std::string FineReport::summary() const {
  std::ostringstream os;
  if (failures.empty()) {
    os << "no exogenous candidate exists";
    return os.str();
  }
  for (std::size_t i = 0; i < failures.size(); ++i) {
    if (i) os << "; ";
    if (!failures[i].candidate.empty()) os << failures[i].candidate << ": ";
    os << failures[i].reason;
    if (!failures[i].vertex.empty()) os << " (at " << failures[i].vertex << ")";
  }
  return os.str();
}

bool RelaxationReport::outer() const {
  return std::any_of(rewrites.begin(), rewrites.end(),
                     [](const GraphRewrite& r) { return r.step == 2; });
}

NetworkSpec validate_network(NetworkSpec spec) {
  std::map<std::string, int> seen;
  for (const auto& v : spec.variables) {
    if (++seen[v.name] > 1)
      throw std::invalid_argument("duplicate variable name: " + v.name);
    if (v.role != Role::exogenous && v.cardinality < 2)
      throw std::invalid_argument("endogenous variable " + v.name +
                                  " must have cardinality >= 2");
  }
  for (const auto& [a, b] : spec.edges) {
    if (!seen.count(a)) throw std::invalid_argument("edge tail unknown: " + a);
    if (!seen.count(b)) throw std::invalid_argument("edge head unknown: " + b);
    if (spec.variable(b).role == Role::exogenous)
      throw std::invalid_argument("exogenous variable has parent: " + b);
  }

  // Kahn's algorithm; ties broken by declaration order for determinism.
  std::map<std::string, int> indegree;
  for (const auto& v : spec.variables) indegree[v.name] = 0;
  for (const auto& [a, b] : spec.edges) ++indegree[b];

  std::vector<std::string> order;
  std::vector<bool> done(spec.variables.size(), false);
  while (order.size() < spec.variables.size()) {
    bool progressed = false;
    for (std::size_t i = 0; i < spec.variables.size(); ++i) {
      const auto& name = spec.variables[i].name;
      if (done[i] || indegree[name] != 0) continue;
      done[i] = true;
      order.push_back(name);
      for (const auto& c : spec.children(name)) --indegree[c];
      progressed = true;
    }
    if (!progressed) throw std::invalid_argument("cycle detected in network");
  }
  spec.topological_order = std::move(order);
  return spec;
}

namespace {

std::vector<std::string> descendants_of(const NetworkSpec& spec, const std::string& root) {
  std::vector<std::string> out;
  std::queue<std::string> frontier;
  std::map<std::string, bool> visited;
  frontier.push(root);
  visited[root] = true;
  while (!frontier.empty()) {
    auto v = frontier.front();
    frontier.pop();
    for (const auto& c : spec.children(v)) {
      if (!visited[c]) {
        visited[c] = true;
        out.push_back(c);
        frontier.push(c);
      }
    }
  }
  return out;
}

}  // namespace

std::variant<FineWitness, FineReport> check_fine_conditions(const NetworkSpec& spec) {
  FineReport report;

  bool any_exogenous = false;
  for (const auto& cand : spec.variables) {
    if (cand.role != Role::exogenous) continue;
    any_exogenous = true;

    FineFailure failure{cand.name, "", ""};
    auto children = spec.children(cand.name);
    auto desc = descendants_of(spec, cand.name);

    // (1) every descendant is a child
    bool ok = true;
    for (const auto& d : desc) {
      if (std::find(children.begin(), children.end(), d) == children.end()) {
        failure.vertex = d;
        failure.reason = "descendant is not a child of the candidate";
        ok = false;
        break;
      }
    }

    // (2) every other vertex is observed with exactly one child, in Ch(lambda)
    std::vector<std::string> instruments;
    if (ok) {
      for (const auto& v : spec.variables) {
        if (v.name == cand.name) continue;
        if (std::find(desc.begin(), desc.end(), v.name) != desc.end()) continue;
        if (v.role != Role::observed) {
          failure = {cand.name, v.name, "non-descendant is not observed"};
          ok = false;
          break;
        }
        auto ch = spec.children(v.name);
        if (ch.size() != 1) {
          failure = {cand.name, v.name, "non-descendant does not have exactly one child"};
          ok = false;
          break;
        }
        if (std::find(children.begin(), children.end(), ch[0]) == children.end()) {
          failure = {cand.name, v.name, "non-descendant's child is not a child of the candidate"};
          ok = false;
          break;
        }
        instruments.push_back(v.name);
      }
    }

    if (ok) {
      FineWitness w;
      w.lambda = cand.name;
      // Declaration order for children and instruments.
      for (const auto& v : spec.variables) {
        if (std::find(children.begin(), children.end(), v.name) != children.end())
          w.children.push_back(v.name);
      }
      w.instruments = std::move(instruments);
      return w;
    }
    report.failures.push_back(failure);
  }

  if (!any_exogenous) {
    // Degenerate case: a fully disconnected graph is Fine with no
    // confounder and an empty child set.
    if (spec.edges.empty()) {
      FineWitness w;
      for (const auto& v : spec.variables) w.instruments.push_back(v.name);
      return w;
    }
    report.failures.push_back({"", "", "no exogenous variable exists"});
  }
  return report;
}

namespace {

struct ConfoundedInstrumentMatch {
  std::string confounder;
  std::string tail;  // the confounder child that takes over as instrument
  std::string head;  // the other child, which the tail then points at
};

std::optional<ConfoundedInstrumentMatch> find_confounded_instrument(const NetworkSpec& spec,
                                             const std::set<std::string>& protected_vars) {
  for (const auto& u : spec.variables) {
    if (u.role != Role::exogenous) continue;
    auto ch = spec.children(u.name);
    if (ch.size() != 2) continue;
    // Try both orderings of the two children as (tail, head).
    for (int flip = 0; flip < 2; ++flip) {
      const auto& a = flip ? ch[1] : ch[0];
      const auto& b = flip ? ch[0] : ch[1];
      if (protected_vars.count(a)) continue;
      // Only an observed tail can take over as the instrument.
      if (spec.variable(a).role != Role::observed) continue;
      auto pa = spec.parents(a);
      if (pa.size() != 1 || pa[0] != u.name) continue;
      auto ca = spec.children(a);
      if (!ca.empty() && (ca.size() != 1 || ca[0] != b)) continue;
      return ConfoundedInstrumentMatch{u.name, a, b};
    }
  }
  return std::nullopt;
}

void erase_variable(NetworkSpec& spec, const std::string& name) {
  std::erase_if(spec.edges,
                [&](const auto& e) { return e.first == name || e.second == name; });
  std::erase_if(spec.variables, [&](const VariableSpec& v) { return v.name == name; });
}

NetworkSpec reduce_confounded_instruments(NetworkSpec spec,
                                          const std::set<std::string>& protected_vars,
                                          std::vector<GraphRewrite>& rewrites) {
  while (auto m = find_confounded_instrument(spec, protected_vars)) {
    if (!spec.has_edge(m->tail, m->head)) {
      spec.edges.emplace_back(m->tail, m->head);
      rewrites.push_back({GraphRewrite::Kind::edge_added, m->tail, m->head, 1});
    }
    erase_variable(spec, m->confounder);
    rewrites.push_back({GraphRewrite::Kind::variable_removed, m->confounder, "", 1});
  }
  return validate_network(std::move(spec));
}

}  // namespace

NetworkSpec apply_confounder_reductions(NetworkSpec spec,
                                   const std::set<std::string>& protected_vars) {
  std::vector<GraphRewrite> rewrites;
  return reduce_confounded_instruments(std::move(spec), protected_vars, rewrites);
}

std::pair<NetworkSpec, RelaxationReport> relax_to_linear(
    const NetworkSpec& spec, const std::set<std::string>& protected_vars) {
  RelaxationReport report;
  NetworkSpec g = reduce_confounded_instruments(spec, protected_vars, report.rewrites);

  if (std::holds_alternative<FineWitness>(check_fine_conditions(g)))
    return {std::move(g), std::move(report)};

  // Step 2: the set of confounded vertices is fixed before any edges move.
  std::vector<std::string> confounded;
  for (const auto& v : g.variables) {
    if (v.role != Role::exogenous && !g.parents(v.name).empty())
      confounded.push_back(v.name);
  }

  std::vector<std::string> old_exogenous;
  for (const auto& v : g.variables)
    if (v.role == Role::exogenous) old_exogenous.push_back(v.name);
  for (const auto& u : old_exogenous) {
    for (const auto& c : g.children(u))
      report.rewrites.push_back({GraphRewrite::Kind::edge_removed, u, c, 2});
    erase_variable(g, u);
    report.rewrites.push_back({GraphRewrite::Kind::variable_removed, u, "", 2});
  }

  std::string lambda = "__lambda";
  while (g.has_variable(lambda)) lambda += "_";
  g.variables.push_back({lambda, 0, Role::exogenous});
  report.rewrites.push_back({GraphRewrite::Kind::variable_added, lambda, "", 2});
  for (const auto& v : confounded) {
    g.edges.emplace_back(lambda, v);
    report.rewrites.push_back({GraphRewrite::Kind::edge_added, lambda, v, 2});
  }

  g = validate_network(std::move(g));
  auto fine = check_fine_conditions(g);
  if (auto* rep = std::get_if<FineReport>(&fine)) {
    throw std::invalid_argument("relaxation did not reach the Fine class: " +
                                rep->summary());
  }
  return {std::move(g), std::move(report)};
}

}  // namespace pidbounds
