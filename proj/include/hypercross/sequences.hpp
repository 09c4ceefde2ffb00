#pragma once

// The positive weight sequence b = (b_j): an explicit head b_1..b_J0 followed
// either by zeros or by a power-law tail b_j = kappa * j^-q. Norms are returned
// as certified enclosures.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <variant>
#include <vector>

#include "hypercross/error.hpp"
#include "hypercross/interval.hpp"

namespace hypercross {

struct ZeroTail {
  friend bool operator==(const ZeroTail&, const ZeroTail&) = default;
};

struct PowerTail {
  double kappa = 1.0;
  double q = 2.0;
  friend bool operator==(const PowerTail&, const PowerTail&) = default;
};

using Tail = std::variant<ZeroTail, PowerTail>;

class WeightSequence {
 public:
  WeightSequence() = default;

  WeightSequence(std::vector<double> head, Tail tail) : head_(std::move(head)), tail_(tail) {
    for (double v : head_) require(std::isfinite(v) && v > 0.0, "head values must be positive and finite");
    if (const auto* pt = std::get_if<PowerTail>(&tail_)) {
      require(std::isfinite(pt->kappa) && pt->kappa > 0.0, "power tail needs kappa > 0");
      require(std::isfinite(pt->q) && pt->q > 0.0, "power tail needs q > 0");
    }
  }

  static WeightSequence finite(std::vector<double> head) { return {std::move(head), ZeroTail{}}; }
  static WeightSequence power(std::vector<double> head, double kappa, double q) {
    return {std::move(head), PowerTail{kappa, q}};
  }

  const std::vector<double>& head() const { return head_; }
  const Tail& tail() const { return tail_; }
  std::size_t head_size() const { return head_.size(); }
  bool zero_tail() const { return std::holds_alternative<ZeroTail>(tail_); }
  const PowerTail* power_tail() const { return std::get_if<PowerTail>(&tail_); }

  /// Largest dimension with b_j > 0, or SIZE_MAX for a power tail.
  std::uint64_t support_end() const {
    return zero_tail() ? head_.size() : std::numeric_limits<std::uint64_t>::max();
  }

  /// b_j for 1-based j.
  double value(std::uint64_t j) const {
    require(j >= 1, "sequence indices are 1-based");
    if (j <= head_.size()) return head_[j - 1];
    if (const auto* pt = power_tail()) return pt->kappa * std::pow(static_cast<double>(j), -pt->q);
    return 0.0;
  }

  /// Moves the next `extra` tail values into the explicit head.
  WeightSequence with_extended_head(std::size_t extra) const {
    if (zero_tail()) return *this;
    std::vector<double> h = head_;
    for (std::size_t i = 0; i < extra; ++i) h.push_back(value(head_.size() + i + 1));
    return {std::move(h), tail_};
  }

  friend bool operator==(const WeightSequence&, const WeightSequence&) = default;

 private:
  std::vector<double> head_;
  Tail tail_ = ZeroTail{};
};

namespace detail {

/// Number of tail terms summed explicitly before the remainder is bracketed.
inline constexpr std::uint64_t kExplicitTailTerms = 4096;

/// Enclosure of x^p for x > 0.
inline Interval power_enclosure(double x, double p) {
  if (p == 1.0) return Interval::exact(x);
  if (p == 2.0) return {rounding::mul_down(x, x), rounding::mul_up(x, x), false};
  const double v = std::pow(x, p);
  return {rounding::widen_down(v), rounding::widen_up(v), false};
}

/// Enclosure of c * integral_A^inf x^-e dx = c A^(1-e) / (e-1), e > 1.
inline Interval power_integral(const Interval& c, double a, double e) {
  const double v = std::pow(a, 1.0 - e) / (e - 1.0);
  return mul_nonneg(c, {rounding::widen_down(v, 6), rounding::widen_up(v, 6), false});
}

/// Enclosure of sum_{j >= first} c j^-e for e > 1 using `explicit_terms` terms
/// and a convexity bracket for the rest:
///   int_{N+1}^inf f + f(N+1)/2  <=  sum_{j>N} f(j)  <=  int_{N+1/2}^inf f.
inline Interval power_tail_sum(const Interval& c, double e, std::uint64_t first,
                               std::uint64_t explicit_terms = kExplicitTailTerms) {
  if (e <= 1.0) return Interval::infinite();
  Interval acc = Interval::exact(0.0);
  const std::uint64_t last = first + explicit_terms;  // exclusive
  for (std::uint64_t j = first; j < last; ++j) {
    const double t = std::pow(static_cast<double>(j), -e);
    acc = acc + mul_nonneg(c, {rounding::widen_down(t), rounding::widen_up(t), false});
  }
  const double n1 = static_cast<double>(last);
  const double fn1 = std::pow(n1, -e);
  const Interval half_f = mul_nonneg(c, {rounding::widen_down(0.5 * fn1), rounding::widen_up(0.5 * fn1), false});
  const Interval lower = power_integral(c, n1, e) + half_f;
  const Interval upper = power_integral(c, n1 - 0.5, e);
  return acc + Interval{lower.lo, upper.hi, false};
}

/// Enclosure of sum_j b_j^p.
inline Interval power_sum(const WeightSequence& b, double p) {
  Interval acc = Interval::exact(0.0);
  for (double v : b.head()) acc = acc + power_enclosure(v, p);
  if (const auto* pt = b.power_tail()) {
    const double e = p * pt->q;
    if (e <= 1.0) return Interval::infinite();
    acc = acc + power_tail_sum(power_enclosure(pt->kappa, p), e, b.head_size() + 1);
  }
  return acc;
}

}  // namespace detail

/// Enclosure of sum_j b_j. Divergent when the tail exponent q <= 1.
inline Interval ell1_norm(const WeightSequence& b) { return detail::power_sum(b, 1.0); }

/// Enclosure of sum_j b_j^p.
inline Interval ellp_norm_p(const WeightSequence& b, double p) {
  require(p > 0.0 && std::isfinite(p), "p must be positive");
  return detail::power_sum(b, p);
}

inline double sup_norm(const WeightSequence& b) {
  double m = 0.0;
  for (double v : b.head()) m = std::max(m, v);
  if (b.power_tail()) m = std::max(m, b.value(b.head_size() + 1));
  return m;
}

/// Smallest J with b_j < threshold for every j > J.
inline std::uint64_t active_dimension(const WeightSequence& b, double threshold) {
  require(threshold > 0.0, "threshold must be positive");
  std::uint64_t last = 0;
  for (std::size_t j = 0; j < b.head_size(); ++j)
    if (b.head()[j] >= threshold) last = j + 1;
  if (const auto* pt = b.power_tail()) {
    const std::uint64_t j0 = b.head_size();
    if (b.value(j0 + 1) >= threshold) {
      const double x = std::pow(pt->kappa / threshold, 1.0 / pt->q);
      if (!(x < 9.0e15)) fail(ErrorKind::Overflow, "active dimension beyond 2^53");
      std::uint64_t j = std::max<std::uint64_t>(j0 + 1, static_cast<std::uint64_t>(std::floor(x)));
      while (j > j0 + 1 && b.value(j) < threshold) --j;
      while (b.value(j + 1) >= threshold) ++j;
      last = std::max(last, j);
    }
  }
  return last;
}

}  // namespace hypercross
