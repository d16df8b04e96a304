#include "pidbounds/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "pidbounds/response.hpp"

namespace pidbounds {

namespace {

constexpr double kTol = 1e-9;

struct EqualitySystem {
  std::size_t n_structural = 0;
  std::size_t n_total = 0;               // structural + slacks
  std::vector<std::vector<double>> rows;  // dense, length n_total
  std::vector<double> rhs;
};

bool implied_bound(const LinearConstraint& c) {
  const auto& terms = c.expression.terms();
  if (terms.size() != 1) return false;
  if (c.rhs - c.expression.constant() != 0.0) return false;
  double a = terms[0].second;
  return (c.relation == Relation::ge && a > 0.0) || (c.relation == Relation::le && a < 0.0);
}

EqualitySystem to_equality_form(const LinearProgram& lp) {
  EqualitySystem sys;
  sys.n_structural = lp.variable_count;
  std::size_t n_slack = 0;
  for (const auto& c : lp.constraints)
    if (!implied_bound(c) && c.relation != Relation::eq) ++n_slack;
  sys.n_total = sys.n_structural + n_slack;

  std::size_t slack = sys.n_structural;
  for (const auto& c : lp.constraints) {
    if (implied_bound(c)) continue;
    std::vector<double> row(sys.n_total, 0.0);
    for (const auto& [j, v] : c.expression.terms()) row[j] = v;
    if (c.relation == Relation::le) row[slack++] = 1.0;
    if (c.relation == Relation::ge) row[slack++] = -1.0;
    sys.rows.push_back(std::move(row));
    sys.rhs.push_back(c.rhs - c.expression.constant());
  }
  return sys;
}

/// Gauss-Jordan over the augmented system; returns the indices of an
/// independent row subset, or nullopt when the system is inconsistent.
std::optional<std::vector<std::size_t>> independent_rows(const EqualitySystem& sys) {
  auto rows = sys.rows;
  auto rhs = sys.rhs;
  const std::size_t m = rows.size(), n = sys.n_total;
  std::vector<std::size_t> picked;
  std::vector<bool> used(m, false);

  for (std::size_t col = 0; col < n && picked.size() < m; ++col) {
    std::size_t best = m;
    double best_abs = 1e-9;
    for (std::size_t i = 0; i < m; ++i) {
      if (used[i]) continue;
      if (std::abs(rows[i][col]) > best_abs) {
        best_abs = std::abs(rows[i][col]);
        best = i;
      }
    }
    if (best == m) continue;
    used[best] = true;
    picked.push_back(best);
    const double inv = 1.0 / rows[best][col];
    for (std::size_t i = 0; i < m; ++i) {
      if (i == best || rows[i][col] == 0.0) continue;
      const double f = rows[i][col] * inv;
      for (std::size_t j = col; j < n; ++j) rows[i][j] -= f * rows[best][j];
      rows[i][col] = 0.0;
      rhs[i] -= f * rhs[best];
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (used[i]) continue;
    bool zero = std::all_of(rows[i].begin(), rows[i].end(),
                            [](double v) { return std::abs(v) <= 1e-8; });
    if (zero && std::abs(rhs[i]) > 1e-8) return std::nullopt;  // 0 = b, b != 0
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

/// Solves the square system over the chosen basis columns; false when
/// singular.
bool solve_basis(const std::vector<std::vector<double>>& rows,
                 const std::vector<double>& rhs, const std::vector<std::size_t>& cols,
                 std::vector<double>& out) {
  const std::size_t r = cols.size();
  std::vector<std::vector<double>> a(r, std::vector<double>(r + 1, 0.0));
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) a[i][j] = rows[i][cols[j]];
    a[i][r] = rhs[i];
  }
  for (std::size_t col = 0; col < r; ++col) {
    std::size_t best = col;
    for (std::size_t i = col + 1; i < r; ++i)
      if (std::abs(a[i][col]) > std::abs(a[best][col])) best = i;
    if (std::abs(a[best][col]) < 1e-10) return false;
    std::swap(a[col], a[best]);
    const double inv = 1.0 / a[col][col];
    for (std::size_t j = col; j <= r; ++j) a[col][j] *= inv;
    for (std::size_t i = 0; i < r; ++i) {
      if (i == col || a[i][col] == 0.0) continue;
      const double f = a[i][col];
      for (std::size_t j = col; j <= r; ++j) a[i][j] -= f * a[col][j];
    }
  }
  out.resize(r);
  for (std::size_t i = 0; i < r; ++i) out[i] = a[i][r];
  return true;
}

}  // namespace

Bounds oracle_bounds(const LinearProgram& lp, const OracleOptions& options) {
  if (lp.variable_count > options.variable_cap)
    throw std::invalid_argument("oracle dimension cap exceeded");

  EqualitySystem sys = to_equality_form(lp);
  auto picked = independent_rows(sys);
  Bounds out;
  if (!picked) {
    out.status = SolveStatus::infeasible;
    return out;
  }

  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  for (auto i : *picked) {
    rows.push_back(sys.rows[i]);
    rhs.push_back(sys.rhs[i]);
  }
  const std::size_t r = rows.size();
  const std::size_t n = sys.n_total;
  if (r > n) throw std::invalid_argument("oracle: more independent rows than variables");

  // Guard the combination count before enumerating.
  double combos = 1.0;
  for (std::size_t i = 0; i < r; ++i) combos *= static_cast<double>(n - i) / (i + 1);
  if (combos > static_cast<double>(options.combination_cap))
    throw std::invalid_argument("oracle combination cap exceeded");

  double best_min = std::numeric_limits<double>::infinity();
  double best_max = -std::numeric_limits<double>::infinity();
  std::vector<double> wit_min, wit_max;

  std::vector<std::size_t> cols(r);
  for (std::size_t i = 0; i < r; ++i) cols[i] = i;
  std::vector<double> basic;
  bool any_vertex = false;

  auto consider = [&](const std::vector<std::size_t>& basis_cols) {
    if (!solve_basis(rows, rhs, basis_cols, basic)) return;
    for (double v : basic)
      if (v < -kTol) return;
    std::vector<double> x(sys.n_structural, 0.0);
    for (std::size_t i = 0; i < r; ++i)
      if (basis_cols[i] < sys.n_structural) x[basis_cols[i]] = std::max(0.0, basic[i]);
    double obj = lp.objective.evaluate(x);
    any_vertex = true;
    if (obj < best_min) {
      best_min = obj;
      wit_min = x;
    }
    if (obj > best_max) {
      best_max = obj;
      wit_max = std::move(x);
    }
  };

  // Lexicographic enumeration of all r-subsets of the n columns.
  bool more = true;
  while (more) {
    consider(cols);
    more = false;
    for (std::size_t i = r; i-- > 0;) {
      if (cols[i] < n - (r - i)) {
        ++cols[i];
        for (std::size_t j = i + 1; j < r; ++j) cols[j] = cols[j - 1] + 1;
        more = true;
        break;
      }
    }
  }

  if (!any_vertex) {
    out.status = SolveStatus::infeasible;
    return out;
  }
  out.status = SolveStatus::optimal;
  out.lower = best_min;
  out.upper = best_max;
  out.lower_witness = std::move(wit_min);
  out.upper_witness = std::move(wit_max);
  return out;
}

IntervalUnion parametric_chain_search(const std::vector<double>& p_y,
                                      const std::vector<std::vector<double>>& p_y_given_a,
                                      std::optional<Prop3Variant> restriction,
                                      double resolution) {
  if (resolution <= 0.0) throw std::invalid_argument("resolution must be positive");
  if (p_y.size() != 2) throw std::invalid_argument("binary chain expected");
  const double p1 = p_y[1];

  const long steps = static_cast<long>(std::llround(1.0 / resolution));
  IntervalUnion out;
  double lo_branch[2] = {2.0, 2.0}, hi_branch[2] = {-1.0, -1.0};

  auto try_point = [&](double q10, double q11) {
    if (std::abs(q11 - q10) < 1e-12) return;
    for (const auto& arm : p_y_given_a) {
      double pi = (arm[1] - q10) / (q11 - q10);
      if (pi < 0.0 || pi > 1.0) return;
    }
    double v = (p1 - q10) / (q11 - q10);
    if (v < 0.0 || v > 1.0) return;
    int branch = q11 > q10 ? 1 : 0;
    lo_branch[branch] = std::min(lo_branch[branch], v);
    hi_branch[branch] = std::max(hi_branch[branch], v);
  };

  // Grid lines plus the critical coordinates where a feasibility boundary
  // (some pi_{1|a} hitting 0 or 1) sits between grid points.
  std::vector<double> coords;
  coords.reserve(static_cast<std::size_t>(steps) + p_y_given_a.size() + 3);
  for (long i = 0; i <= steps; ++i) coords.push_back(static_cast<double>(i) * resolution);
  for (const auto& arm : p_y_given_a) {
    coords.push_back(arm[1]);
    coords.push_back(1.0 - arm[1]);
  }
  coords.push_back(p1);
  coords.push_back(0.5);
  std::sort(coords.begin(), coords.end());

  for (double q10 : coords) {
    if (restriction == Prop3Variant::A1 && q10 > 0.0) break;
    if (restriction == Prop3Variant::A3 && q10 > 0.5) break;
    if (restriction == Prop3Variant::label_independent) {
      try_point(q10, 1.0 - q10);
      continue;
    }
    for (double q11 : coords) {
      // A3: both error rates are in the minority class.
      if (restriction == Prop3Variant::A3 && q11 < 0.5) continue;
      try_point(q10, q11);
    }
  }

  for (int b = 0; b < 2; ++b)
    if (hi_branch[b] >= lo_branch[b]) out.intervals.push_back({lo_branch[b], hi_branch[b]});
  return out.normalized();
}

ContainmentTrial generative_containment_trial(const NetworkSpec& spec,
                                              const std::vector<AssumptionSpec>& assumptions,
                                              const TargetSpec& target, std::uint64_t seed) {
  ContainmentTrial trial;
  NetworkSpec g = spec.validated() ? spec : validate_network(spec);
  auto fine = check_fine_conditions(g);
  if (std::holds_alternative<FineReport>(fine))
    throw std::invalid_argument("generative trial requires a Fine-class network: " +
                                std::get<FineReport>(fine).summary());
  const auto witness = std::get<FineWitness>(fine);
  ResponseSpace space = enumerate_response_space(g, witness);

  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gamma(1.0, 1.0);

  // Instrument marginal, bounded away from zero.
  std::vector<double> marginal(space.arm_count());
  double msum = 0.0;
  for (auto& v : marginal) msum += (v = gamma(rng) + 0.05);
  for (auto& v : marginal) v /= msum;

  // Assumption constraints are data-independent in their supports; a
  // placeholder conditional table is enough to compile them.
  std::vector<std::vector<double>> uniform(
      space.arm_count(),
      std::vector<double>(observed_outcome_count(space),
                          1.0 / static_cast<double>(observed_outcome_count(space))));
  ObservedData placeholder{marginal, uniform};
  std::vector<LinearConstraint> assumption_constraints;
  for (const auto& a : assumptions) {
    auto cs = compile_assumption(space, placeholder, a);
    assumption_constraints.insert(assumption_constraints.end(), cs.begin(), cs.end());
  }

  const int max_attempts = 200;
  std::vector<double> psi(space.atom_count());
  bool found = false;
  for (int attempt = 0; attempt < max_attempts && !found; ++attempt) {
    double sum = 0.0;
    for (auto& v : psi) sum += (v = gamma(rng));
    for (auto& v : psi) v /= sum;

    // Zero-rhs equalities with non-negative coefficients force their
    // support to zero; project instead of rejecting.
    for (const auto& c : assumption_constraints) {
      if (c.relation != Relation::eq || c.rhs != 0.0) continue;
      bool nonneg = std::all_of(c.expression.terms().begin(), c.expression.terms().end(),
                                [](const auto& t) { return t.second >= 0.0; });
      if (!nonneg) continue;
      for (const auto& [i, v] : c.expression.terms()) psi[i] = 0.0;
    }
    sum = 0.0;
    for (double v : psi) sum += v;
    if (sum < 1e-9) continue;
    for (auto& v : psi) v /= sum;

    found = std::all_of(assumption_constraints.begin(), assumption_constraints.end(),
                        [&](const LinearConstraint& c) { return c.residual(psi) <= 1e-9; });
  }
  if (!found) {
    trial.sampler_failed = true;
    trial.note = "no feasible response distribution found in " +
                 std::to_string(max_attempts) + " attempts";
    return trial;
  }

  // Exact observables implied by the sampled distribution.
  const auto slots = observed_child_slots(space);
  const std::size_t outcomes = observed_outcome_count(space);
  std::vector<std::vector<double>> conditionals(space.arm_count(),
                                                std::vector<double>(outcomes, 0.0));
  Propagator prop(space);
  for (std::size_t arm = 0; arm < space.arm_count(); ++arm) {
    const auto arm_vals = space.arm_values(arm);
    for (std::size_t atom = 0; atom < space.atom_count(); ++atom) {
      auto values = prop.run(atom, arm_vals);
      std::size_t o = 0;
      for (auto s : slots) o = o * space.cardinality(s) + values[s];
      conditionals[arm][o] += psi[atom];
    }
  }
  ObservedData data{marginal, std::move(conditionals)};

  auto constraints = compile_probability(space, /*include_nonnegativity=*/false);
  auto obs = compile_observed(space, data);
  constraints.insert(constraints.end(), obs.begin(), obs.end());
  for (const auto& a : assumptions) {
    auto cs = compile_assumption(space, data, a);
    constraints.insert(constraints.end(), cs.begin(), cs.end());
  }
  LinearExpression objective = build_target(space, data, target);

  trial.true_value = objective.evaluate(psi);
  trial.bounds = solve_bounds(space.atom_count(), constraints, objective);
  if (trial.bounds.status != SolveStatus::optimal) {
    trial.note = "pipeline returned " + std::string(to_string(trial.bounds.status));
    trial.pass = false;
    return trial;
  }
  trial.pass = trial.true_value >= trial.bounds.lower - 1e-7 &&
               trial.true_value <= trial.bounds.upper + 1e-7;
  return trial;
}

}  // namespace pidbounds
