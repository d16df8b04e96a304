#pragma once

#include <string>
#include <vector>

namespace pidbounds {

/// Possibly non-convex identified set: a union of closed intervals in
/// [0, 1], kept sorted and disjoint after normalization.
struct IntervalUnion {
  struct Interval {
    double lo = 0.0;
    double hi = 0.0;
  };

  std::vector<Interval> intervals;
  std::vector<std::string> notes;  // degenerate-denominator flags etc.

  bool empty() const { return intervals.empty(); }
  double min() const;
  double max() const;
  bool contains(double v, double tol = 0.0) const;

  /// Sorts, clips to [0,1] and merges overlapping branches.
  IntervalUnion normalized() const;
};

/// Closed-form sharp bounds on P(X=1) for the binary chain A -> X -> Y:
/// the union over y of
///   [ (p_y - min_a p_{y|a}) / (1 - min_a p_{y|a}),  p_y / max_a p_{y|a} ].
/// `merge` = false preserves the raw two-branch structure.
IntervalUnion prop3_bounds(const std::vector<double>& p_y,
                           const std::vector<std::vector<double>>& p_y_given_a,
                           bool merge = true);

enum class Prop3Variant { A1, A3, label_independent };

Prop3Variant prop3_variant_from_string(const std::string& s);

/// Refinements under additional error assumptions:
///   A1  (no false positives)      -> [p1, p1 / max_a p_{1|a}]
///   A3  (errors minority class)   -> the y=1 branch of prop3_bounds
///   label-independent noise       -> [p1, r] u [1-r, 1-p1], r = (p1-p*)/(1-2p*)
IntervalUnion prop3_corollary_bounds(Prop3Variant variant, const std::vector<double>& p_y,
                                     const std::vector<std::vector<double>>& p_y_given_a,
                                     bool merge = true);

}  // namespace pidbounds
