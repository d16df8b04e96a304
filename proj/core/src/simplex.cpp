#include "pidbounds/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace pidbounds {

namespace {

constexpr double kPivotTol = 1e-9;

struct Row {
  std::vector<std::pair<std::size_t, double>> terms;  // structural columns
  Relation relation;
  double rhs;  // constant already folded in, non-negative after normalization
  bool negated = false;
  std::size_t original_index = 0;
};

/// a*x_i >= 0 (a > 0) and its mirror are already implied by the standard
/// form's variable bounds.
bool implied_by_nonnegativity(const LinearConstraint& c) {
  const auto& terms = c.expression.terms();
  if (terms.size() != 1) return false;
  double rhs = c.rhs - c.expression.constant();
  if (rhs != 0.0) return false;
  double a = terms[0].second;
  return (c.relation == Relation::ge && a > 0.0) || (c.relation == Relation::le && a < 0.0);
}

class Tableau {
 public:
  Tableau(const LinearProgram& lp, const SimplexOptions& opt) : opt_(opt) {
    n_ = lp.variable_count;

    std::vector<Row> rows;
    rows.reserve(lp.constraints.size());
    for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
      const auto& c = lp.constraints[i];
      if (implied_by_nonnegativity(c)) continue;
      Row r;
      r.terms = c.expression.terms();
      r.relation = c.relation;
      r.rhs = c.rhs - c.expression.constant();
      r.original_index = i;
      if (r.rhs < 0.0) {
        for (auto& [j, v] : r.terms) v = -v;
        r.rhs = -r.rhs;
        r.relation = r.relation == Relation::le ? Relation::ge
                     : r.relation == Relation::ge ? Relation::le
                                                  : Relation::eq;
        r.negated = true;
      }
      rows.push_back(std::move(r));
    }
    m_ = rows.size();

    std::size_t n_slack = 0;
    for (const auto& r : rows)
      if (r.relation != Relation::eq) ++n_slack;
    std::size_t n_art = 0;
    for (const auto& r : rows)
      if (r.relation != Relation::le) ++n_art;

    slack_begin_ = n_;
    art_begin_ = n_ + n_slack;
    cols_ = art_begin_ + n_art + 1;  // + rhs column
    rhs_col_ = cols_ - 1;

    t_.assign((m_ + 1) * cols_, 0.0);
    basis_.assign(m_, 0);
    art_row_of_.assign(n_art, 0);
    row_original_.resize(m_);

    std::size_t slack = slack_begin_, art = art_begin_;
    for (std::size_t i = 0; i < m_; ++i) {
      double* row = at(i);
      for (const auto& [j, v] : rows[i].terms) row[j] = v;
      row[rhs_col_] = rows[i].rhs;
      row_original_[i] = rows[i].original_index;
      if (rows[i].relation == Relation::le) {
        row[slack] = 1.0;
        basis_[i] = slack++;
      } else if (rows[i].relation == Relation::ge) {
        row[slack++] = -1.0;
        row[art] = 1.0;
        art_row_of_[art - art_begin_] = i;
        basis_[i] = art++;
      } else {
        row[art] = 1.0;
        art_row_of_[art - art_begin_] = i;
        basis_[i] = art++;
      }
    }
  }

  SimplexResult solve(const LinearExpression& objective, Sense sense) {
    SimplexResult result;

    // Phase 1: minimize the sum of artificials, priced out over the basis.
    if (art_begin_ < rhs_col_) {
      double* cost = at(m_);
      std::fill(cost, cost + cols_, 0.0);
      for (std::size_t a = art_begin_; a < rhs_col_; ++a) cost[a] = 1.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] >= art_begin_) subtract_row(m_, i, 1.0);
      }
      if (!iterate(result, /*phase1=*/true)) return result;  // hit iteration wall

      double infeas = -at(m_)[rhs_col_];
      if (infeas > opt_.feasibility_tol) {
        result.status = SolveStatus::infeasible;
        result.infeasibility_by_constraint.assign(m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
          if (basis_[i] >= art_begin_) result.infeasibility_by_constraint[i] = at(i)[rhs_col_];
        return result;
      }
      drive_out_artificials();
    }

    // Phase 2 cost row: reduced costs of the real objective.
    const double flip = sense == Sense::maximize ? -1.0 : 1.0;
    double* cost = at(m_);
    std::fill(cost, cost + cols_, 0.0);
    for (const auto& [j, v] : objective.terms()) cost[j] = flip * v;
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t b = basis_[i];
      if (b < rhs_col_ && cost[b] != 0.0) subtract_row(m_, i, cost[b]);
    }

    if (!iterate(result, /*phase1=*/false)) return result;

    result.status = SolveStatus::optimal;
    result.solution.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) result.solution[basis_[i]] = at(i)[rhs_col_];
    result.objective = objective.constant();
    for (const auto& [j, v] : objective.terms()) result.objective += v * result.solution[j];
    return result;
  }

  std::size_t row_original(std::size_t i) const { return row_original_[i]; }
  std::size_t row_count() const { return m_; }

 private:
  double* at(std::size_t row) { return t_.data() + row * cols_; }

  void subtract_row(std::size_t target, std::size_t source, double factor) {
    if (factor == 0.0) return;
    double* tr = at(target);
    const double* sr = at(source);
    for (std::size_t j = 0; j < cols_; ++j) tr[j] -= factor * sr[j];
  }

  /// Pivots until optimality. Returns false (with status set) on
  /// unboundedness or the hard iteration wall.
  bool iterate(SimplexResult& result, bool phase1) {
    const std::size_t enter_limit = phase1 ? rhs_col_ : art_begin_;
    const long stall_limit =
        static_cast<long>(opt_.stall_factor * static_cast<double>(m_ + cols_));
    const long hard_cap = 200000;
    double best = std::numeric_limits<double>::infinity();
    long since_improvement = 0;
    bool bland = false;

    for (long iter = 0;; ++iter) {
      if (iter > hard_cap) throw std::runtime_error("simplex iteration cap exceeded");
      double* cost = at(m_);

      // Entering column: Dantzig, or Bland once stalled.
      std::size_t pivot_col = cols_;
      if (bland) {
        for (std::size_t j = 0; j < enter_limit; ++j) {
          if (blocked_.size() > j && blocked_[j]) continue;
          if (cost[j] < -opt_.optimality_tol) {
            pivot_col = j;
            break;
          }
        }
      } else {
        double most = -opt_.optimality_tol;
        for (std::size_t j = 0; j < enter_limit; ++j) {
          if (blocked_.size() > j && blocked_[j]) continue;
          if (cost[j] < most) {
            most = cost[j];
            pivot_col = j;
          }
        }
      }
      if (pivot_col == cols_) return true;  // optimal for this phase

      // Ratio test; ties to the smallest basis index (lexicographic-ish).
      std::size_t pivot_row = m_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        double a = at(i)[pivot_col];
        if (a <= kPivotTol) continue;
        double ratio = at(i)[rhs_col_] / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && pivot_row < m_ && basis_[i] < basis_[pivot_row])) {
          best_ratio = ratio;
          pivot_row = i;
        }
      }
      if (pivot_row == m_) {
        result.status = SolveStatus::unbounded;
        return false;
      }

      pivot(pivot_row, pivot_col);
      ++result.iterations;

      double obj = cost[rhs_col_];
      if (obj < best - 1e-12) {
        best = obj;
        since_improvement = 0;
      } else if (++since_improvement > stall_limit) {
        bland = true;
      }
    }
  }

  void pivot(std::size_t pivot_row, std::size_t pivot_col) {
    double* pr = at(pivot_row);
    const double inv = 1.0 / pr[pivot_col];
    if (inv != 1.0)
      for (std::size_t j = 0; j < cols_; ++j) pr[j] *= inv;
    pr[pivot_col] = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == pivot_row) continue;
      double f = at(i)[pivot_col];
      if (f != 0.0) {
        subtract_row(i, pivot_row, f);
        at(i)[pivot_col] = 0.0;
      }
    }
    basis_[pivot_row] = pivot_col;
  }

  /// Pivots zero-level artificials out of the basis where possible; rows
  /// that stay artificial are redundant and their artificial is frozen at
  /// zero by blocking the column.
  void drive_out_artificials() {
    blocked_.assign(cols_, false);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < art_begin_) continue;
      double* row = at(i);
      std::size_t col = cols_;
      for (std::size_t j = 0; j < art_begin_; ++j) {
        if (std::abs(row[j]) > 1e-7) {
          col = j;
          break;
        }
      }
      if (col != cols_) pivot(i, col);
    }
    for (std::size_t a = art_begin_; a < rhs_col_; ++a) blocked_[a] = true;
  }

  SimplexOptions opt_;
  std::size_t n_ = 0, m_ = 0, cols_ = 0;
  std::size_t slack_begin_ = 0, art_begin_ = 0, rhs_col_ = 0;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> art_row_of_;
  std::vector<std::size_t> row_original_;
  std::vector<char> blocked_;
};

}  // namespace

SimplexResult simplex_solve(const LinearProgram& lp, const SimplexOptions& options) {
  Tableau tableau(lp, options);
  SimplexResult raw = tableau.solve(lp.objective, lp.sense);
  if (raw.status == SolveStatus::infeasible) {
    // Re-key residuals by original constraint index.
    std::vector<double> residuals(lp.constraints.size(), 0.0);
    for (std::size_t i = 0; i < raw.infeasibility_by_constraint.size(); ++i)
      residuals[tableau.row_original(i)] = raw.infeasibility_by_constraint[i];
    raw.infeasibility_by_constraint = std::move(residuals);
  }
  return raw;
}

Bounds solve_bounds(std::size_t variable_count,
                    const std::vector<LinearConstraint>& constraints,
                    const LinearExpression& objective, const SimplexOptions& options) {
  LinearProgram lp;
  lp.variable_count = variable_count;
  lp.constraints = constraints;
  lp.objective = objective;

  Bounds out;

  lp.sense = Sense::minimize;
  SimplexResult lo = simplex_solve(lp, options);
  if (lo.status != SolveStatus::optimal) {
    out.status = lo.status;
    out.diagnostics.iterations_lower = lo.iterations;
    for (std::size_t i = 0; i < lo.infeasibility_by_constraint.size(); ++i)
      if (lo.infeasibility_by_constraint[i] > options.feasibility_tol)
        out.diagnostics.infeasible_labels.emplace_back(constraints[i].label,
                                                       lo.infeasibility_by_constraint[i]);
    return out;
  }

  lp.sense = Sense::maximize;
  SimplexResult hi = simplex_solve(lp, options);
  if (hi.status != SolveStatus::optimal) {
    out.status = hi.status;
    return out;
  }

  out.lower = lo.objective;
  out.upper = hi.objective;
  out.lower_witness = std::move(lo.solution);
  out.upper_witness = std::move(hi.solution);
  out.status = SolveStatus::optimal;
  out.diagnostics.iterations_lower = lo.iterations;
  out.diagnostics.iterations_upper = hi.iterations;
  double residual = 0.0;
  for (const auto& c : constraints) {
    residual = std::max(residual, c.residual(out.lower_witness));
    residual = std::max(residual, c.residual(out.upper_witness));
  }
  out.diagnostics.max_constraint_residual = residual;
  return out;
}

void dump_lp(std::ostream& os, const LinearProgram& lp) {
  os.precision(17);
  os << "objective | ";
  for (const auto& [j, v] : lp.objective.terms()) os << j << ":" << v << " ";
  os << "| " << (lp.sense == Sense::minimize ? "min" : "max") << " | "
     << lp.objective.constant() << "\n";
  for (const auto& c : lp.constraints) {
    os << c.label << " | ";
    for (const auto& [j, v] : c.expression.terms()) os << j << ":" << v << " ";
    os << "| " << relation_symbol(c.relation) << " | " << c.rhs - c.expression.constant()
       << "\n";
  }
}

}  // namespace pidbounds
