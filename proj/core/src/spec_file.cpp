#include "pidbounds/spec_file.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pidbounds {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& where,
                       const std::string& what) {
  throw std::invalid_argument(origin + ": " + where + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& origin,
                    const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(origin, where, std::string("missing field '") + key + "'");
  return *it;
}

std::vector<double> number_list(const json& j, const std::string& origin,
                                const std::string& where) {
  if (!j.is_array()) fail(origin, where, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) fail(origin, where, "expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

void check_distribution(const std::vector<double>& p, const std::string& origin,
                        const std::string& where) {
  double sum = 0.0;
  for (double v : p) {
    if (v < -1e-12) fail(origin, where, "negative probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "distribution not normalized (sum=" << sum << ")";
    fail(origin, where, os.str());
  }
}

NetworkSpec parse_network(const json& root, const std::string& origin) {
  NetworkSpec net;
  const json& vars = require(root, "variables", origin, "top level");
  if (!vars.is_array() || vars.empty()) fail(origin, "variables", "expected a non-empty array");
  for (const auto& v : vars) {
    VariableSpec spec;
    spec.name = require(v, "name", origin, "variables").get<std::string>();
    spec.role = role_from_string(
        require(v, "role", origin, "variables['" + spec.name + "']").get<std::string>());
    if (spec.role != Role::exogenous)
      spec.cardinality = require(v, "cardinality", origin, "variables['" + spec.name + "']")
                             .get<int>();
    net.variables.push_back(std::move(spec));
  }
  const json& edges = require(root, "edges", origin, "top level");
  if (!edges.is_array()) fail(origin, "edges", "expected an array of [from, to] pairs");
  for (const auto& e : edges) {
    if (!e.is_array() || e.size() != 2) fail(origin, "edges", "expected [from, to] pairs");
    net.edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
  }
  try {
    return validate_network(net);
  } catch (const std::invalid_argument& err) {
    fail(origin, "network", err.what());
  }
}

ObservedSection parse_observed(const json& root, const std::string& origin) {
  ObservedSection obs;
  const json& o = require(root, "observed", origin, "top level");
  for (const auto& v : require(o, "instruments", origin, "observed.instruments"))
    obs.instruments.push_back(v.get<std::string>());
  for (const auto& v : require(o, "outcomes", origin, "observed.outcomes"))
    obs.outcomes.push_back(v.get<std::string>());
  obs.marginal = number_list(require(o, "marginal", origin, "observed"), origin,
                             "observed.marginal");
  check_distribution(obs.marginal, origin, "observed.marginal");
  const json& tables = require(o, "conditionals", origin, "observed");
  if (!tables.is_array()) fail(origin, "observed.conditionals", "expected an array of tables");
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const std::string where = "observed.conditionals[" + std::to_string(i) + "]";
    auto table = number_list(tables[i], origin, where);
    if (!table.empty() || obs.marginal.at(i) > 0.0) check_distribution(table, origin, where);
    obs.conditionals.push_back(std::move(table));
  }
  if (obs.conditionals.size() != obs.marginal.size())
    fail(origin, "observed.conditionals", "expected one table per instrument arm");
  return obs;
}

AssumptionSpec parse_assumption(const json& a, const std::string& origin, std::size_t index) {
  const std::string where = "assumptions[" + std::to_string(index) + "]";
  AssumptionSpec spec;
  spec.kind = require(a, "kind", origin, where).get<std::string>();
  if (spec.kind != "A0" && spec.kind != "A1" && spec.kind != "A2" && spec.kind != "A3" &&
      spec.kind != "A4" && spec.kind != "A5")
    fail(origin, where, "unknown assumption kind '" + spec.kind + "'");

  auto& m = spec.measurement;
  auto& c = spec.causal;
  if (a.contains("epsilon")) m.epsilon = a["epsilon"].get<double>();
  if (a.contains("lambda")) m.lambda = a["lambda"].get<double>();
  if (a.contains("threshold")) m.distance_threshold = a["threshold"].get<int>();
  if (a.contains("slack")) {
    m.slack = a["slack"].get<double>();
    c.slack = m.slack;
  }
  if (a.contains("level")) {
    const std::string level = a["level"].get<std::string>();
    if (level == "observed")
      m.level = ConstraintLevel::observed;
    else if (level == "per_arm" || level == "counterfactual")
      m.level = ConstraintLevel::per_arm_counterfactual;
    else
      fail(origin, where, "unknown level '" + level + "'");
  }
  if (a.contains("truth")) {
    m.truth_variable = a["truth"].get<std::string>();
    c.truth_variable = m.truth_variable;
  }
  if (a.contains("proxy")) {
    m.proxy_variable = a["proxy"].get<std::string>();
    c.proxy_variable = m.proxy_variable;
  }
  if (a.contains("treatment")) c.treatment_variable = a["treatment"].get<std::string>();
  if (a.contains("outcome")) c.outcome_variable = a["outcome"].get<std::string>();
  if (a.contains("distance")) {
    std::vector<std::vector<double>> d;
    for (std::size_t i = 0; i < a["distance"].size(); ++i)
      d.push_back(number_list(a["distance"][i], origin, where + ".distance"));
    m.distance = std::move(d);
  }
  return spec;
}

TargetSpec parse_target(const json& root, const std::string& origin) {
  const json& t = require(root, "target", origin, "top level");
  TargetSpec spec;
  try {
    spec.kind = target_kind_from_string(require(t, "kind", origin, "target").get<std::string>());
  } catch (const std::invalid_argument& err) {
    fail(origin, "target.kind", err.what());
  }
  spec.variable = require(t, "variable", origin, "target").get<std::string>();
  if (t.contains("moment_order")) spec.moment_order = t["moment_order"].get<int>();
  if (t.contains("value")) spec.value = t["value"].get<int>();
  if (t.contains("intervention_variable"))
    spec.intervention_variable = t["intervention_variable"].get<std::string>();
  if (t.contains("t")) spec.t = t["t"].get<int>();
  if (t.contains("t_prime")) spec.t_prime = t["t_prime"].get<int>();
  if (spec.interventional() && spec.intervention_variable.empty())
    fail(origin, "target", "interventional targets need 'intervention_variable'");
  return spec;
}

SweepPlan parse_sweep(const json& root, const std::string& origin) {
  SweepPlan plan;
  if (!root.contains("sweep")) return plan;
  const json& s = root["sweep"];
  if (s.contains("subsets")) {
    for (const auto& sub : s["subsets"]) {
      std::vector<std::string> kinds;
      for (const auto& k : sub) kinds.push_back(k.get<std::string>());
      plan.subsets.push_back(std::move(kinds));
    }
  }
  if (s.contains("parameter") != s.contains("values"))
    fail(origin, "sweep", "'parameter' and 'values' must appear together");
  if (s.contains("parameter")) {
    plan.parameter = s["parameter"].get<std::string>();
    if (plan.parameter.find('.') == std::string::npos)
      fail(origin, "sweep.parameter", "expected 'kind.field', e.g. 'A0.epsilon'");
    plan.values = number_list(s["values"], origin, "sweep.values");
  }
  return plan;
}

}  // namespace

ModelFile parse_spec_text(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& err) {
    throw std::invalid_argument(origin + ": " + err.what());
  }
  if (!root.is_object()) fail(origin, "top level", "expected a JSON object");

  ModelFile model;
  model.network = parse_network(root, origin);
  model.observed = parse_observed(root, origin);
  if (root.contains("assumptions")) {
    const json& list = root["assumptions"];
    if (!list.is_array()) fail(origin, "assumptions", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i)
      model.assumptions.push_back(parse_assumption(list[i], origin, i));
  }
  model.target = parse_target(root, origin);
  model.sweep = parse_sweep(root, origin);

  for (const auto& name : model.observed.instruments)
    if (!model.network.has_variable(name))
      fail(origin, "observed.instruments", "unknown variable '" + name + "'");
  for (const auto& name : model.observed.outcomes)
    if (!model.network.has_variable(name))
      fail(origin, "observed.outcomes", "unknown variable '" + name + "'");
  return model;
}

ModelFile parse_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open model-spec file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec_text(buf.str(), path);
}

}  // namespace pidbounds
