#pragma once

// Outward-rounded enclosures in plain double precision. Sums and products are
// rounded with error-free transformations (TwoSum / FMA) so exact inputs stay
// exact; library calls (pow, exp, log) are widened by a few ulps.

#include <algorithm>
#include <cmath>
#include <limits>

namespace hypercross {

namespace rounding {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double next_up(double x) { return std::nextafter(x, kInf); }
inline double next_down(double x) { return std::nextafter(x, -kInf); }

inline double add_down(double a, double b) {
  const double s = a + b;
  if (!std::isfinite(s)) return s;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return err < 0.0 ? next_down(s) : s;
}

inline double add_up(double a, double b) {
  const double s = a + b;
  if (!std::isfinite(s)) return s;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return err > 0.0 ? next_up(s) : s;
}

inline double sub_down(double a, double b) { return add_down(a, -b); }
inline double sub_up(double a, double b) { return add_up(a, -b); }

inline double mul_down(double a, double b) {
  const double p = a * b;
  if (!std::isfinite(p)) return p;
  const double err = std::fma(a, b, -p);
  return err < 0.0 ? next_down(p) : p;
}

inline double mul_up(double a, double b) {
  const double p = a * b;
  if (!std::isfinite(p)) return p;
  const double err = std::fma(a, b, -p);
  return err > 0.0 ? next_up(p) : p;
}

inline double div_down(double a, double b) {
  const double q = a / b;
  if (!std::isfinite(q) || b == 0.0) return q;
  // a - q*b exactly; its sign relative to b tells on which side a/b lies.
  const double rem = std::fma(-q, b, a);
  return (rem != 0.0 && ((rem < 0.0) != (b < 0.0))) ? next_down(q) : q;
}

inline double div_up(double a, double b) {
  const double q = a / b;
  if (!std::isfinite(q) || b == 0.0) return q;
  const double rem = std::fma(-q, b, a);
  return (rem != 0.0 && ((rem < 0.0) == (b < 0.0))) ? next_up(q) : q;
}

/// Result of a libm call known to be within `ulps` units of the true value.
inline double widen_down(double x, int ulps = 4) {
  for (int i = 0; i < ulps; ++i) x = next_down(x);
  return x;
}
inline double widen_up(double x, int ulps = 4) {
  for (int i = 0; i < ulps; ++i) x = next_up(x);
  return x;
}

}  // namespace rounding

/// Closed enclosure [lo, hi]. `divergent` marks a sum known to be infinite.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool divergent = false;

  static Interval exact(double x) { return {x, x, false}; }
  static Interval infinite() { return {rounding::kInf, rounding::kInf, true}; }

  double mid() const { return divergent ? rounding::kInf : 0.5 * (lo + hi); }
  double width() const { return divergent ? rounding::kInf : hi - lo; }
  bool contains(double x) const { return divergent ? x >= lo : (lo <= x && x <= hi); }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

inline Interval operator+(const Interval& a, const Interval& b) {
  if (a.divergent || b.divergent) return Interval::infinite();
  return {rounding::add_down(a.lo, b.lo), rounding::add_up(a.hi, b.hi), false};
}

/// Product of two nonnegative enclosures.
inline Interval mul_nonneg(const Interval& a, const Interval& b) {
  if (a.divergent || b.divergent) return Interval::infinite();
  return {rounding::mul_down(a.lo, b.lo), rounding::mul_up(a.hi, b.hi), false};
}

/// Neumaier compensated summation; the result depends only on the order of adds.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace hypercross
