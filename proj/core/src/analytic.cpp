#include "pidbounds/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pidbounds {

double IntervalUnion::min() const {
  double m = 1.0;
  for (const auto& iv : intervals) m = std::min(m, iv.lo);
  return m;
}

double IntervalUnion::max() const {
  double m = 0.0;
  for (const auto& iv : intervals) m = std::max(m, iv.hi);
  return m;
}

bool IntervalUnion::contains(double v, double tol) const {
  return std::any_of(intervals.begin(), intervals.end(), [&](const Interval& iv) {
    return v >= iv.lo - tol && v <= iv.hi + tol;
  });
}

IntervalUnion IntervalUnion::normalized() const {
  IntervalUnion out;
  out.notes = notes;
  std::vector<Interval> sorted;
  for (auto iv : intervals) {
    iv.lo = std::clamp(iv.lo, 0.0, 1.0);
    iv.hi = std::clamp(iv.hi, 0.0, 1.0);
    if (iv.lo <= iv.hi) sorted.push_back(iv);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (const auto& iv : sorted) {
    if (!out.intervals.empty() && iv.lo <= out.intervals.back().hi) {
      out.intervals.back().hi = std::max(out.intervals.back().hi, iv.hi);
    } else {
      out.intervals.push_back(iv);
    }
  }
  return out;
}

namespace {

void check_chain_inputs(const std::vector<double>& p_y,
                        const std::vector<std::vector<double>>& p_y_given_a) {
  if (p_y.size() != 2) throw std::invalid_argument("p_y must be binary");
  if (p_y_given_a.empty()) throw std::invalid_argument("at least one arm required");
  for (const auto& arm : p_y_given_a)
    if (arm.size() != 2) throw std::invalid_argument("per-arm conditionals must be binary");
}

double min_arm(const std::vector<std::vector<double>>& arms, int y) {
  double m = 1.0;
  for (const auto& a : arms) m = std::min(m, a[y]);
  return m;
}

double max_arm(const std::vector<std::vector<double>>& arms, int y) {
  double m = 0.0;
  for (const auto& a : arms) m = std::max(m, a[y]);
  return m;
}

}  // namespace

IntervalUnion prop3_bounds(const std::vector<double>& p_y,
                           const std::vector<std::vector<double>>& p_y_given_a,
                           bool merge) {
  check_chain_inputs(p_y, p_y_given_a);
  IntervalUnion out;
  for (int y = 0; y < 2; ++y) {
    const double mn = min_arm(p_y_given_a, y);
    const double mx = max_arm(p_y_given_a, y);
    if (mn >= 1.0) {
      // Limit of the formula as min_a p_{y|a} -> 1: the branch collapses to
      // a point when the marginal agrees, otherwise it is empty.
      out.notes.push_back("degenerate branch y=" + std::to_string(y) +
                          ": min_a p_{y|a} = 1");
      if (p_y[y] >= 1.0) out.intervals.push_back({1.0, 1.0});
      continue;
    }
    double lo = (p_y[y] - mn) / (1.0 - mn);
    double hi = mx > 0.0 ? p_y[y] / mx : 1.0;
    lo = std::max(lo, 0.0);
    hi = std::min(hi, 1.0);
    if (lo <= hi) out.intervals.push_back({lo, hi});
  }
  return merge ? out.normalized() : out;
}

Prop3Variant prop3_variant_from_string(const std::string& s) {
  if (s == "A1") return Prop3Variant::A1;
  if (s == "A3") return Prop3Variant::A3;
  if (s == "label_independent" || s == "label-independent")
    return Prop3Variant::label_independent;
  throw std::invalid_argument("unknown prop3 variant: " + s);
}

IntervalUnion prop3_corollary_bounds(Prop3Variant variant, const std::vector<double>& p_y,
                                     const std::vector<std::vector<double>>& p_y_given_a,
                                     bool merge) {
  check_chain_inputs(p_y, p_y_given_a);
  const double p1 = p_y[1];
  const double mn = min_arm(p_y_given_a, 1);
  const double mx = max_arm(p_y_given_a, 1);
  IntervalUnion out;

  switch (variant) {
    case Prop3Variant::A1: {
      double hi = mx > 0.0 ? std::min(p1 / mx, 1.0) : 1.0;
      if (p1 <= hi) out.intervals.push_back({p1, hi});
      break;
    }
    case Prop3Variant::A3: {
      // Binary A3 pins q_{1|0} <= 1/2 <= q_{1|1}, so the attainable q range
      // clamps at 1/2 whenever the observed arms do not straddle it.
      const double mn_c = std::min(mn, 0.5);
      const double mx_c = std::max(mx, 0.5);
      double lo = std::max((p1 - mn_c) / (1.0 - mn_c), 0.0);
      double hi = std::min(p1 / mx_c, 1.0);
      if (lo <= hi) out.intervals.push_back({lo, hi});
      break;
    }
    case Prop3Variant::label_independent: {
      const double p_star = std::min(mn, 1.0 - mx);
      if (std::abs(1.0 - 2.0 * p_star) < 1e-12) {
        // Continuity limit at p* = 1/2: the set degenerates to the ordered
        // pair of marginal endpoints.
        out.notes.push_back("degenerate: p* = 1/2");
        double lo = std::min(p1, 1.0 - p1), hi = std::max(p1, 1.0 - p1);
        out.intervals.push_back({lo, hi});
        break;
      }
      // The target (p1 - e) / (1 - 2e) runs from p1 (e = 0) to r (e = p*)
      // monotonically, in whichever direction sign(2 p1 - 1) dictates; the
      // e > 1/2 regime contributes the reflected interval.
      const double r = (p1 - p_star) / (1.0 - 2.0 * p_star);
      out.intervals.push_back({std::min(p1, r), std::max(p1, r)});
      out.intervals.push_back({std::min(1.0 - p1, 1.0 - r), std::max(1.0 - p1, 1.0 - r)});
      break;
    }
  }
  return merge ? out.normalized() : out;
}

}  // namespace pidbounds
