#include "pidbounds/constraints.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pidbounds {

namespace {

void check_distribution(const std::vector<double>& p, const std::string& what, double tol) {
  double sum = 0.0;
  for (double v : p) {
    if (v < -tol) throw std::invalid_argument(what + ": negative probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol)
    throw std::invalid_argument(what + ": distribution not normalized (sum=" +
                                std::to_string(sum) + ")");
}

std::string format_values(std::span<const int> values) {
  std::ostringstream os;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os << ",";
    os << values[i];
  }
  return os.str();
}

}  // namespace

ObservedData ObservedData::validated(const ResponseSpace& space,
                                     std::vector<double> marginal,
                                     std::vector<std::vector<double>> conditionals,
                                     double tol) {
  if (marginal.size() != space.arm_count())
    throw std::invalid_argument("instrument marginal has wrong length");
  check_distribution(marginal, "instrument marginal", tol);
  if (conditionals.size() != space.arm_count())
    throw std::invalid_argument("expected one conditional table per instrument arm");
  const std::size_t outcomes = observed_outcome_count(space);
  for (std::size_t a = 0; a < conditionals.size(); ++a) {
    if (conditionals[a].empty() && marginal[a] <= tol) continue;  // unreachable arm
    if (conditionals[a].empty())
      throw std::invalid_argument("arm conditional missing for arm " + std::to_string(a));
    if (conditionals[a].size() != outcomes)
      throw std::invalid_argument("arm conditional has wrong length for arm " +
                                  std::to_string(a));
    check_distribution(conditionals[a], "conditional for arm " + std::to_string(a), tol);
  }
  return ObservedData{std::move(marginal), std::move(conditionals)};
}

std::vector<std::size_t> observed_child_slots(const ResponseSpace& space) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < space.child_count(); ++i) {
    std::size_t s = space.instrument_count() + i;
    if (space.spec().variable(space.slot_name(s)).role == Role::observed) out.push_back(s);
  }
  return out;
}

std::size_t observed_outcome_count(const ResponseSpace& space) {
  std::size_t n = 1;
  for (auto s : observed_child_slots(space)) n *= space.cardinality(s);
  return n;
}

MeasurementKind measurement_kind_from_string(const std::string& s) {
  if (s == "A0") return MeasurementKind::A0;
  if (s == "A1") return MeasurementKind::A1;
  if (s == "A2") return MeasurementKind::A2;
  if (s == "A3") return MeasurementKind::A3;
  throw std::invalid_argument("unknown assumption kind: " + s);
}

std::vector<LinearConstraint> compile_probability(const ResponseSpace& space,
                                                  bool include_nonnegativity) {
  std::vector<LinearConstraint> out;
  LinearConstraint total;
  for (std::size_t atom = 0; atom < space.atom_count(); ++atom)
    total.expression.add(atom, 1.0);
  total.relation = Relation::eq;
  total.rhs = 1.0;
  total.label = "probability[total]";
  out.push_back(std::move(total));
  // The per-atom lower bounds are carried implicitly by the solver's
  // standard form; they are still emitted here so the constraint set is
  // self-contained for external solvers.
  if (!include_nonnegativity) return out;
  for (std::size_t atom = 0; atom < space.atom_count(); ++atom) {
    LinearConstraint c;
    c.expression.add(atom, 1.0);
    c.relation = Relation::ge;
    c.rhs = 0.0;
    c.label = "probability[nonneg," + std::to_string(atom) + "]";
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<LinearConstraint> compile_observed(const ResponseSpace& space,
                                               const ObservedData& data) {
  if (data.instrument_marginal.size() != space.arm_count() ||
      data.arm_conditionals.size() != space.arm_count())
    throw std::invalid_argument("observed data dimension mismatch");

  const auto slots = observed_child_slots(space);
  const std::size_t outcomes = observed_outcome_count(space);

  std::vector<LinearConstraint> out;
  Propagator prop(space);
  for (std::size_t arm = 0; arm < space.arm_count(); ++arm) {
    if (data.instrument_marginal[arm] <= 0.0 && data.arm_conditionals[arm].empty())
      continue;
    if (data.arm_conditionals[arm].size() != outcomes)
      throw std::invalid_argument("arm conditional missing or wrong size for arm " +
                                  std::to_string(arm));
    const auto arm_vals = space.arm_values(arm);

    std::vector<LinearExpression> buckets(outcomes);
    for (std::size_t atom = 0; atom < space.atom_count(); ++atom) {
      auto values = prop.run(atom, arm_vals);
      std::size_t o = 0;
      for (auto s : slots) o = o * space.cardinality(s) + values[s];
      buckets[o].add(atom, 1.0);
    }
    for (std::size_t o = 0; o < outcomes; ++o) {
      LinearConstraint c;
      c.expression = std::move(buckets[o]);
      c.relation = Relation::eq;
      c.rhs = data.arm_conditionals[arm][o];
      c.label = "observed[a=" + format_values(arm_vals) + ",o=" + std::to_string(o) + "]";
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::pair<std::string, std::string> default_measurement_pair(const ResponseSpace& space) {
  const auto& spec = space.spec();
  std::vector<std::string> latents;
  for (const auto& name : space.witness().children)
    if (spec.variable(name).role == Role::latent_target) latents.push_back(name);
  if (latents.size() != 1)
    throw std::invalid_argument(
        "measurement pair is ambiguous: specify truth/proxy variables explicitly");
  const std::string truth = latents[0];

  std::vector<std::string> observed_children_of_truth;
  for (const auto& c : spec.children(truth))
    if (spec.variable(c).role == Role::observed) observed_children_of_truth.push_back(c);
  if (observed_children_of_truth.size() == 1) return {truth, observed_children_of_truth[0]};

  std::vector<std::string> observed_lambda_children;
  for (const auto& name : space.witness().children)
    if (spec.variable(name).role == Role::observed) observed_lambda_children.push_back(name);
  if (observed_lambda_children.size() == 1) return {truth, observed_lambda_children[0]};

  throw std::invalid_argument(
      "measurement pair is ambiguous: specify truth/proxy variables explicitly");
}

namespace {

double pair_distance(const MeasurementParams& params, int x, int y) {
  if (params.distance) return (*params.distance)[x][y];
  return std::abs(x - y);
}

/// Joint (truth, proxy) mass expressions. Observed level: one table,
/// arm-averaged with the instrument marginal. Counterfactual level: one
/// table per arm, unweighted.
std::vector<std::vector<std::vector<LinearExpression>>> mass_tables(
    const ResponseSpace& space, const ObservedData& data, const MeasurementParams& params,
    std::size_t truth_slot, std::size_t proxy_slot) {
  const int tx = space.cardinality(truth_slot);
  const int ty = space.cardinality(proxy_slot);
  const bool per_arm = params.level == ConstraintLevel::per_arm_counterfactual;
  const std::size_t tables = per_arm ? space.arm_count() : 1;

  std::vector<std::vector<std::vector<LinearExpression>>> out(
      tables, std::vector<std::vector<LinearExpression>>(tx, std::vector<LinearExpression>(ty)));

  Propagator prop(space);
  for (std::size_t arm = 0; arm < space.arm_count(); ++arm) {
    const double weight = per_arm ? 1.0 : data.instrument_marginal[arm];
    if (!per_arm && weight == 0.0) continue;
    const auto arm_vals = space.arm_values(arm);
    auto& table = out[per_arm ? arm : 0];
    for (std::size_t atom = 0; atom < space.atom_count(); ++atom) {
      auto values = prop.run(atom, arm_vals);
      table[values[truth_slot]][values[proxy_slot]].add(atom, weight);
    }
  }
  return out;
}

std::string level_tag(const MeasurementParams& params, std::size_t arm) {
  if (params.level == ConstraintLevel::per_arm_counterfactual)
    return "arm=" + std::to_string(arm);
  return "observed";
}

}  // namespace

std::vector<LinearConstraint> compile_measurement(const ResponseSpace& space,
                                                  const ObservedData& data,
                                                  MeasurementKind kind,
                                                  const MeasurementParams& params) {
  if (params.epsilon < 0.0 || params.lambda < 0.0 || params.slack < 0.0)
    throw std::invalid_argument("negative epsilon/lambda/slack");

  std::string truth = params.truth_variable;
  std::string proxy = params.proxy_variable;
  if (truth.empty() || proxy.empty()) {
    auto [t, p] = default_measurement_pair(space);
    if (truth.empty()) truth = t;
    if (proxy.empty()) proxy = p;
  }
  const std::size_t ts = space.slot(truth);
  const std::size_t ps = space.slot(proxy);
  const int tx = space.cardinality(ts);
  const int ty = space.cardinality(ps);
  if (params.distance &&
      (params.distance->size() != static_cast<std::size_t>(tx) ||
       (*params.distance)[0].size() != static_cast<std::size_t>(ty)))
    throw std::invalid_argument("distance matrix dimension mismatch");

  auto tables = mass_tables(space, data, params, ts, ps);
  std::vector<LinearConstraint> out;

  for (std::size_t arm = 0; arm < tables.size(); ++arm) {
    const auto& mass = tables[arm];
    const std::string tag = level_tag(params, arm);
    switch (kind) {
      case MeasurementKind::A0: {
        LinearConstraint c;
        for (int x = 0; x < tx; ++x)
          for (int y = 0; y < ty; ++y)
            if (pair_distance(params, x, y) > params.distance_threshold)
              c.expression.add_scaled(mass[x][y], 1.0);
        c.relation = Relation::le;
        c.rhs = params.epsilon;
        c.label = "A0[" + tag + ",thr=" + std::to_string(params.distance_threshold) + "]";
        out.push_back(std::move(c));
        break;
      }
      case MeasurementKind::A1: {
        LinearConstraint c;
        for (int x = 0; x < tx; ++x)
          for (int y = 0; y < std::min(x, ty); ++y) c.expression.add_scaled(mass[x][y], 1.0);
        c.relation = params.slack > 0.0 ? Relation::le : Relation::eq;
        c.rhs = params.slack;
        c.label = "A1[" + tag + "]";
        out.push_back(std::move(c));
        break;
      }
      case MeasurementKind::A2: {
        for (int x = 0; x < tx; ++x) {
          for (int y = 0; y < ty; ++y) {
            for (int y2 = y + 1; y2 < ty; ++y2) {
              if (pair_distance(params, x, y) != pair_distance(params, x, y2)) continue;
              LinearExpression diff;
              diff.add_scaled(mass[x][y], 1.0);
              diff.add_scaled(mass[x][y2], -1.0);
              std::string base = "A2[" + tag + ",x=" + std::to_string(x) + ",y=" +
                                 std::to_string(y) + ",y'=" + std::to_string(y2);
              out.push_back({diff, Relation::le, params.lambda, base + ",+]"});
              out.push_back({diff.negated(), Relation::le, params.lambda, base + ",-]"});
            }
          }
        }
        break;
      }
      case MeasurementKind::A3: {
        for (int x = 0; x < tx; ++x) {
          for (int y = 0; y < ty; ++y) {
            for (int y2 = 0; y2 < ty; ++y2) {
              if (!(pair_distance(params, x, y) < pair_distance(params, x, y2))) continue;
              LinearExpression diff;
              diff.add_scaled(mass[x][y], 1.0);
              diff.add_scaled(mass[x][y2], -1.0);
              out.push_back({std::move(diff), Relation::ge, -params.slack,
                             "A3[" + tag + ",x=" + std::to_string(x) + ",y=" +
                                 std::to_string(y) + ",y'=" + std::to_string(y2) + "]"});
            }
          }
        }
        break;
      }
    }
  }
  return out;
}

namespace {

bool same_expression(const LinearExpression& a, const LinearExpression& b) {
  return a.terms() == b.terms() && a.constant() == b.constant();
}

/// Atoms violating monotonicity of `read_slot` when `clamp_slot` is raised,
/// one expression per joint setting of the remaining instruments
/// (duplicates collapsed).
std::vector<LinearConstraint> monotonicity_constraints(const ResponseSpace& space,
                                                       std::size_t clamp_slot,
                                                       std::size_t read_slot, double slack,
                                                       const std::string& label_prefix) {
  const int card = space.cardinality(clamp_slot);
  std::vector<LinearConstraint> out;
  Propagator prop(space);

  for (int t = 0; t < card; ++t) {
    for (int t2 = t + 1; t2 < card; ++t2) {
      std::vector<LinearExpression> exprs;
      for (std::size_t arm = 0; arm < space.arm_count(); ++arm) {
        const auto arm_vals = space.arm_values(arm);
        LinearExpression e;
        Intervention lo{{clamp_slot, t}};
        Intervention hi{{clamp_slot, t2}};
        for (std::size_t atom = 0; atom < space.atom_count(); ++atom) {
          int v_lo = prop.run(atom, arm_vals, lo)[read_slot];
          int v_hi = prop.run(atom, arm_vals, hi)[read_slot];
          if (v_hi < v_lo) e.add(atom, 1.0);
        }
        bool dup = std::any_of(exprs.begin(), exprs.end(),
                               [&](const LinearExpression& x) { return same_expression(x, e); });
        if (!dup) exprs.push_back(std::move(e));
      }
      for (std::size_t k = 0; k < exprs.size(); ++k) {
        LinearConstraint c;
        c.expression = std::move(exprs[k]);
        c.relation = slack > 0.0 ? Relation::le : Relation::eq;
        c.rhs = slack;
        c.label = label_prefix + "[t=" + std::to_string(t) + ",t'=" + std::to_string(t2) +
                  (exprs.size() > 1 ? ",arm=" + std::to_string(k) : "") + "]";
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

}  // namespace

std::vector<LinearConstraint> compile_causal(const ResponseSpace& space, CausalKind kind,
                                             const CausalParams& params) {
  if (params.slack < 0.0) throw std::invalid_argument("negative slack");
  if (kind == CausalKind::A4) {
    std::size_t t_slot = space.slot(params.treatment_variable);
    std::size_t x_slot = space.slot(params.outcome_variable);
    return monotonicity_constraints(space, t_slot, x_slot, params.slack, "A4");
  }
  std::size_t x_slot = space.slot(params.truth_variable);
  std::size_t y_slot = space.slot(params.proxy_variable);
  return monotonicity_constraints(space, x_slot, y_slot, params.slack, "A5");
}

std::vector<LinearConstraint> compile_assumption(const ResponseSpace& space,
                                                 const ObservedData& data,
                                                 const AssumptionSpec& assumption) {
  if (assumption.kind == "A4" || assumption.kind == "A5") {
    CausalParams p = assumption.causal;
    if (assumption.kind == "A4") {
      if (p.outcome_variable.empty() || p.treatment_variable.empty())
        throw std::invalid_argument("A4 requires treatment and outcome variables");
      return compile_causal(space, CausalKind::A4, p);
    }
    if (p.truth_variable.empty() || p.proxy_variable.empty()) {
      auto [t, y] = default_measurement_pair(space);
      if (p.truth_variable.empty()) p.truth_variable = t;
      if (p.proxy_variable.empty()) p.proxy_variable = y;
    }
    return compile_causal(space, CausalKind::A5, p);
  }
  return compile_measurement(space, data, measurement_kind_from_string(assumption.kind),
                             assumption.measurement);
}

}  // namespace pidbounds
