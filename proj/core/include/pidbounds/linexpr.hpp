#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pidbounds {

/// Sparse affine form  sum_i coeff_i * x_i + constant  over a dense variable
/// index space. Terms are stored as (index, coefficient) pairs; zero
/// coefficients are dropped and duplicate indices merged on normalization.
class LinearExpression {
 public:
  LinearExpression() = default;

  void add(std::size_t index, double coeff) {
    if (coeff == 0.0) return;
    terms_.emplace_back(index, coeff);
    dirty_ = true;
  }

  void add_constant(double c) { constant_ += c; }
  double constant() const { return constant_; }

  /// Adds `scale * other` (constant included).
  void add_scaled(const LinearExpression& other, double scale) {
    if (scale == 0.0) return;
    for (const auto& [i, c] : other.terms()) add(i, scale * c);
    constant_ += scale * other.constant_;
  }

  const std::vector<std::pair<std::size_t, double>>& terms() const {
    normalize();
    return terms_;
  }

  std::size_t term_count() const { return terms().size(); }
  bool empty() const { return terms().empty(); }

  double evaluate(std::span<const double> values) const {
    double acc = constant_;
    for (const auto& [i, c] : terms()) acc += c * values[i];
    return acc;
  }

  std::size_t max_index() const {
    std::size_t m = 0;
    for (const auto& [i, c] : terms()) m = std::max(m, i);
    return m;
  }

  LinearExpression negated() const {
    LinearExpression out;
    out.add_scaled(*this, -1.0);
    return out;
  }

 private:
  void normalize() const {
    if (!dirty_) return;
    std::sort(terms_.begin(), terms_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t w = 0;
    for (std::size_t r = 0; r < terms_.size(); ++r) {
      if (w > 0 && terms_[w - 1].first == terms_[r].first) {
        terms_[w - 1].second += terms_[r].second;
      } else {
        terms_[w++] = terms_[r];
      }
    }
    terms_.resize(w);
    std::erase_if(terms_, [](const auto& t) { return t.second == 0.0; });
    dirty_ = false;
  }

  mutable std::vector<std::pair<std::size_t, double>> terms_;
  mutable bool dirty_ = false;
  double constant_ = 0.0;
};

enum class Relation { eq, le, ge };

inline const char* relation_symbol(Relation r) {
  switch (r) {
    case Relation::eq: return "=";
    case Relation::le: return "<=";
    default: return ">=";
  }
}

/// One compiled constraint. `label` records which assumption produced it,
/// uniquely over (kind, params, arm); the CLI sweep keys on it.
struct LinearConstraint {
  LinearExpression expression;
  Relation relation = Relation::eq;
  double rhs = 0.0;
  std::string label;

  /// Signed violation of the constraint at `values` (0 when satisfied).
  double residual(std::span<const double> values) const {
    double lhs = expression.evaluate(values);
    switch (relation) {
      case Relation::eq: return std::abs(lhs - rhs);
      case Relation::le: return std::max(0.0, lhs - rhs);
      default: return std::max(0.0, rhs - lhs);
    }
  }
};

enum class Sense { minimize, maximize };

struct LinearProgram {
  LinearExpression objective;
  std::vector<LinearConstraint> constraints;
  std::size_t variable_count = 0;
  Sense sense = Sense::minimize;
};

enum class SolveStatus { optimal, infeasible, unbounded };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    default: return "unbounded";
  }
}

}  // namespace pidbounds
