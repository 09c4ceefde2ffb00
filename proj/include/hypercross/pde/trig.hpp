#pragma once

// Real trigonometric polynomials on the torus T^m = [0,1)^m:
//   f(x) = sum_k c_k cos(2 pi k.x) + s_k sin(2 pi k.x),
// stored with k canonical (first nonzero component positive, or k = 0).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "hypercross/error.hpp"
#include "hypercross/interval.hpp"

namespace hypercross::pde {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Freq = std::vector<std::int64_t>;

/// +1 if the first nonzero component is positive, -1 if negative, 0 for k = 0.
inline int freq_sign(const Freq& k) {
  for (auto c : k)
    if (c != 0) return c > 0 ? 1 : -1;
  return 0;
}

inline Freq negated(Freq k) {
  for (auto& c : k) c = -c;
  return k;
}

inline double dot(const Freq& k, const Freq& l) {
  double acc = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) acc += static_cast<double>(k[i]) * static_cast<double>(l[i]);
  return acc;
}

inline double norm2_sq(const Freq& k) { return dot(k, k); }

struct CosSin {
  double cos = 0.0;
  double sin = 0.0;
  friend bool operator==(const CosSin&, const CosSin&) = default;
};

class TrigFunction {
 public:
  explicit TrigFunction(std::uint32_t m = 1) : m_(m) { require(m >= 1, "m must be at least 1"); }

  static TrigFunction constant(std::uint32_t m, double c) {
    TrigFunction f(m);
    f.add_mode(Freq(m, 0), c, 0.0);
    return f;
  }

  std::uint32_t m() const { return m_; }

  /// Adds c cos(2 pi k.x) + s sin(2 pi k.x); k is canonicalised.
  void add_mode(Freq k, double c, double s) {
    require(k.size() == m_, "mode has the wrong dimension");
    require(std::isfinite(c) && std::isfinite(s), "mode coefficients must be finite");
    const int sg = freq_sign(k);
    if (sg < 0) {
      k = negated(std::move(k));
      s = -s;
    }
    if (sg == 0) s = 0.0;  // sin(0) vanishes
    auto& cs = modes_[std::move(k)];
    cs.cos += c;
    cs.sin += s;
  }

  const std::map<Freq, CosSin>& modes() const { return modes_; }

  /// Complex Fourier coefficient f^_k = int f e^{-2 pi i k.x} dx.
  std::complex<double> fourier(const Freq& k) const {
    const int sg = freq_sign(k);
    if (sg == 0) {
      auto it = modes_.find(k);
      return it == modes_.end() ? 0.0 : it->second.cos;
    }
    auto it = modes_.find(sg > 0 ? k : negated(k));
    if (it == modes_.end()) return 0.0;
    const auto [c, s] = it->second;
    return sg > 0 ? std::complex<double>(0.5 * c, -0.5 * s) : std::complex<double>(0.5 * c, 0.5 * s);
  }

  double operator()(std::span<const double> x) const {
    double acc = 0.0;
    for (const auto& [k, cs] : modes_) {
      double ph = 0.0;
      for (std::size_t i = 0; i < m_; ++i) ph += static_cast<double>(k[i]) * x[i];
      ph *= kTwoPi;
      acc += cs.cos * std::cos(ph) + cs.sin * std::sin(ph);
    }
    return acc;
  }

  /// d f / d x_i
  double partial(std::size_t i, std::span<const double> x) const {
    double acc = 0.0;
    for (const auto& [k, cs] : modes_) {
      double ph = 0.0;
      for (std::size_t d = 0; d < m_; ++d) ph += static_cast<double>(k[d]) * x[d];
      ph *= kTwoPi;
      acc += kTwoPi * static_cast<double>(k[i]) * (-cs.cos * std::sin(ph) + cs.sin * std::cos(ph));
    }
    return acc;
  }

  /// Upper bound on ||f||_inf: the sum of mode amplitudes.
  double sup_bound() const {
    double acc = 0.0;
    for (const auto& [k, cs] : modes_) acc += std::hypot(cs.cos, cs.sin);
    return rounding::widen_up(acc, 8);
  }

  /// Upper bound on ||d f / d x_i||_inf.
  double partial_sup_bound(std::size_t i) const {
    double acc = 0.0;
    for (const auto& [k, cs] : modes_)
      acc += kTwoPi * std::abs(static_cast<double>(k[i])) * std::hypot(cs.cos, cs.sin);
    return rounding::widen_up(acc, 8);
  }

  /// Upper bound on |f|_{W^1_inf} = max_i ||d f / d x_i||_inf.
  double w_seminorm_bound() const {
    double out = 0.0;
    for (std::size_t i = 0; i < m_; ++i) out = std::max(out, partial_sup_bound(i));
    return out;
  }

  double l2_norm() const {
    double acc = 0.0;
    for (const auto& [k, cs] : modes_)
      acc += freq_sign(k) == 0 ? cs.cos * cs.cos : 0.5 * (cs.cos * cs.cos + cs.sin * cs.sin);
    return std::sqrt(acc);
  }

  /// ||f||_{V'} = (sum_{k != 0} |f^_k|^2 / ((2 pi)^2 |k|_2^2))^{1/2}
  double dual_norm() const {
    double acc = 0.0;
    for (const auto& [k, cs] : modes_) {
      if (freq_sign(k) == 0) continue;
      acc += 0.5 * (cs.cos * cs.cos + cs.sin * cs.sin) / (kTwoPi * kTwoPi * norm2_sq(k));
    }
    return std::sqrt(acc);
  }

  double mean() const {
    auto it = modes_.find(Freq(m_, 0));
    return it == modes_.end() ? 0.0 : it->second.cos;
  }

  /// Largest |k|_inf among stored modes.
  std::int64_t max_frequency() const {
    std::int64_t out = 0;
    for (const auto& [k, cs] : modes_)
      for (auto c : k) out = std::max<std::int64_t>(out, c < 0 ? -c : c);
    return out;
  }

  /// this + t * g
  TrigFunction plus_scaled(const TrigFunction& g, double t) const {
    require(g.m_ == m_, "dimension mismatch");
    TrigFunction out = *this;
    for (const auto& [k, cs] : g.modes_) out.add_mode(k, t * cs.cos, t * cs.sin);
    return out;
  }

  friend bool operator==(const TrigFunction&, const TrigFunction&) = default;

 private:
  std::uint32_t m_;
  std::map<Freq, CosSin> modes_;
};

/// Visits the points of the uniform grid {0, 1/g, ..., (g-1)/g}^m.
template <class Fn>
void for_each_grid_point(std::uint32_t m, std::uint32_t g, Fn&& fn) {
  std::vector<std::uint32_t> idx(m, 0);
  std::vector<double> x(m, 0.0);
  while (true) {
    for (std::uint32_t i = 0; i < m; ++i) x[i] = static_cast<double>(idx[i]) / g;
    fn(std::span<const double>(x));
    std::uint32_t i = 0;
    while (i < m && ++idx[i] == g) idx[i++] = 0;
    if (i == m) break;
  }
}

/// Certified enclosure [min, max] of h over the torus given h's values on a
/// grid and Lipschitz bounds L_i of h in each coordinate: every point lies
/// within 1/(2g) of a grid node per coordinate.
template <class Fn>
Interval certified_range(std::uint32_t m, std::uint32_t g, std::span<const double> lipschitz, Fn&& h) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for_each_grid_point(m, g, [&](std::span<const double> x) {
    const double v = h(x);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  });
  double margin = 0.0;
  for (double L : lipschitz) margin += L * 0.5 / g;
  margin = rounding::widen_up(margin * (1.0 + 1e-12) + 1e-14 * std::max(std::abs(lo), std::abs(hi)), 8);
  return {lo - margin, hi + margin, false};
}

}  // namespace hypercross::pde
