#pragma once

// Finitely supported multi-indices s = (s_1, s_2, ...) and the factorial-ratio
// weight w(s) = (|s|_1! / s!) b^s, evaluated in the log domain.

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hypercross/error.hpp"

namespace hypercross {

struct IndexEntry {
  std::uint32_t dim;  // 1-based
  std::uint32_t exp;  // >= 1

  friend bool operator==(const IndexEntry&, const IndexEntry&) = default;
  friend auto operator<=>(const IndexEntry&, const IndexEntry&) = default;
};

class MultiIndex {
 public:
  static constexpr std::uint64_t kMaxComponent = std::numeric_limits<std::uint32_t>::max();

  MultiIndex() = default;

  /// Builds from (dimension, exponent) pairs in any order. Zero exponents are
  /// dropped; repeated dimensions are an error.
  static MultiIndex from_pairs(std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs) {
    std::sort(pairs.begin(), pairs.end());
    MultiIndex s;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto [dim, exp] = pairs[i];
      require(dim >= 1, "multi-index dimensions are 1-based");
      if (dim > kMaxComponent || exp > kMaxComponent)
        fail(ErrorKind::Overflow, "multi-index component exceeds 2^32-1");
      if (i > 0 && pairs[i - 1].first == dim) require(false, "repeated dimension in multi-index");
      if (exp == 0) continue;
      s.entries_.push_back({static_cast<std::uint32_t>(dim), static_cast<std::uint32_t>(exp)});
      s.degree_ += exp;
    }
    return s;
  }

  static MultiIndex unit(std::uint64_t dim, std::uint64_t exp = 1) { return from_pairs({{dim, exp}}); }

  std::span<const IndexEntry> entries() const { return entries_; }
  bool is_zero() const { return entries_.empty(); }
  std::size_t support_size() const { return entries_.size(); }
  std::uint64_t degree() const { return degree_; }
  std::uint32_t max_dim() const { return entries_.empty() ? 0 : entries_.back().dim; }

  std::uint32_t operator[](std::uint64_t dim) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), dim,
                               [](const IndexEntry& e, std::uint64_t d) { return e.dim < d; });
    return (it != entries_.end() && it->dim == dim) ? it->exp : 0;
  }

  /// s + by * e_dim
  MultiIndex incremented(std::uint64_t dim, std::uint64_t by = 1) const {
    require(dim >= 1, "multi-index dimensions are 1-based");
    if (dim > kMaxComponent) fail(ErrorKind::Overflow, "dimension exceeds 2^32-1");
    MultiIndex out = *this;
    auto it = std::lower_bound(out.entries_.begin(), out.entries_.end(), dim,
                               [](const IndexEntry& e, std::uint64_t d) { return e.dim < d; });
    if (it != out.entries_.end() && it->dim == dim) {
      if (it->exp + by > kMaxComponent) fail(ErrorKind::Overflow, "exponent exceeds 2^32-1");
      it->exp += static_cast<std::uint32_t>(by);
    } else if (by > 0) {
      if (by > kMaxComponent) fail(ErrorKind::Overflow, "exponent exceeds 2^32-1");
      out.entries_.insert(it, {static_cast<std::uint32_t>(dim), static_cast<std::uint32_t>(by)});
    }
    out.degree_ += by;
    return out;
  }

  /// s - e_dim; requires s_dim >= 1.
  MultiIndex decremented(std::uint64_t dim) const {
    MultiIndex out = *this;
    auto it = std::lower_bound(out.entries_.begin(), out.entries_.end(), dim,
                               [](const IndexEntry& e, std::uint64_t d) { return e.dim < d; });
    require(it != out.entries_.end() && it->dim == dim, "decrement of a zero component");
    if (--it->exp == 0) out.entries_.erase(it);
    --out.degree_;
    return out;
  }

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.entries_ == b.entries_; }

  /// Canonical order: by degree, then lexicographically by (dimension, exponent) entries.
  friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
    if (auto c = a.degree_ <=> b.degree_; c != 0) return c;
    return std::lexicographical_compare_three_way(a.entries_.begin(), a.entries_.end(),
                                                  b.entries_.begin(), b.entries_.end());
  }

  std::size_t hash() const {
    std::size_t h = 0x9e3779b97f4a7c15ull;
    for (const auto& e : entries_) {
      h ^= (static_cast<std::size_t>(e.dim) << 32 | e.exp) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }

  std::string to_string() const {
    std::string out = "{";
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(entries_[i].dim) + ":" + std::to_string(entries_[i].exp);
    }
    return out + "}";
  }

 private:
  std::vector<IndexEntry> entries_;
  std::uint64_t degree_ = 0;
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& s) const { return s.hash(); }
};

inline std::uint64_t degree(const MultiIndex& s) { return s.degree(); }

namespace detail {

inline constexpr std::size_t kLogFactorialTable = 4096;

inline const std::array<double, kLogFactorialTable>& log_factorial_table() {
  static const auto table = [] {
    std::array<double, kLogFactorialTable> t{};
    for (std::size_t n = 0; n < kLogFactorialTable; ++n) t[n] = std::lgamma(static_cast<double>(n) + 1.0);
    return t;
  }();
  return table;
}

}  // namespace detail

/// ln(n!). Tabulated below 4096, Stirling series above (truncation < 1e-20).
inline double log_factorial(std::uint64_t n) {
  if (n < detail::kLogFactorialTable) return detail::log_factorial_table()[n];
  const double x = static_cast<double>(n);
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  return x * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi * x) +
         inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0));
}

/// ln C(n, r)
inline double log_binomial(std::uint64_t n, std::uint64_t r) {
  return log_factorial(n) - log_factorial(r) - log_factorial(n - r);
}

/// ln(|s|_1! / s!)
inline double log_multinomial(const MultiIndex& s) {
  double acc = log_factorial(s.degree());
  for (const auto& e : s.entries()) acc -= log_factorial(e.exp);
  return acc;
}

/// ln w(s). `zero` is set when some b_j on the support vanishes (then log_value is -inf).
struct LogWeight {
  double log_value = 0.0;
  bool zero = false;

  double value() const { return zero ? 0.0 : std::exp(log_value); }
};

}  // namespace hypercross
