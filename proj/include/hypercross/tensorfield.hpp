#pragma once

// Sparse coefficient fields v = sum v_{k,s} e_k(x) L_s(y) on T^m x I^inf,
// the weighted norms of A^{alpha,b} and K^beta, and the truncation S_T.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <utility>
#include <vector>

#include "hypercross/cross.hpp"
#include "hypercross/error.hpp"
#include "hypercross/interval.hpp"
#include "hypercross/multiindex.hpp"
#include "hypercross/sequences.hpp"
#include "hypercross/weights.hpp"

namespace hypercross {

struct FieldKey {
  std::vector<std::int64_t> k;
  MultiIndex s;

  friend bool operator==(const FieldKey&, const FieldKey&) = default;
  friend auto operator<=>(const FieldKey& x, const FieldKey& y) {
    if (auto c = x.k <=> y.k; c != 0) return c;
    return x.s <=> y.s;
  }
};

inline std::uint64_t kinf_norm(const std::vector<std::int64_t>& k) {
  std::uint64_t out = 0;
  for (auto c : k) out = std::max<std::uint64_t>(out, static_cast<std::uint64_t>(c < 0 ? -c : c));
  return out;
}

class CoefficientField {
 public:
  using Map = std::map<FieldKey, double>;

  explicit CoefficientField(std::uint32_t m = 1) : m_(m) { require(m >= 1, "m must be at least 1"); }

  std::uint32_t m() const { return m_; }

  /// Sets v_{k,s}; a zero value removes the entry.
  void set(std::vector<std::int64_t> k, MultiIndex s, double value) {
    require(k.size() == m_, "frequency vector has the wrong length");
    for (auto c : k) require(c != 0, "frequency components must be nonzero");
    require(std::isfinite(value), "coefficients must be finite");
    FieldKey key{std::move(k), std::move(s)};
    if (value == 0.0)
      coeffs_.erase(key);
    else
      coeffs_[std::move(key)] = value;
  }

  double get(const std::vector<std::int64_t>& k, const MultiIndex& s) const {
    auto it = coeffs_.find(FieldKey{k, s});
    return it == coeffs_.end() ? 0.0 : it->second;
  }

  std::size_t size() const { return coeffs_.size(); }
  bool empty() const { return coeffs_.empty(); }
  Map::const_iterator begin() const { return coeffs_.begin(); }
  Map::const_iterator end() const { return coeffs_.end(); }

  friend bool operator==(const CoefficientField&, const CoefficientField&) = default;

 private:
  std::uint32_t m_;
  Map coeffs_;
};

/// v - u entrywise.
inline CoefficientField difference(const CoefficientField& v, const CoefficientField& u) {
  require(v.m() == u.m(), "fields live on different tori");
  CoefficientField out = v;
  for (const auto& [key, val] : u) out.set(key.k, key.s, out.get(key.k, key.s) - val);
  return out;
}

/// ln rho_{alpha,b}(k,s) = alpha ln|k|_inf - ln w(s); +inf where w(s) = 0.
inline double log_rho(double alpha, const std::vector<std::int64_t>& k, const MultiIndex& s, const WeightSequence& b) {
  const LogWeight lw = log_weight_or_zero(s, b);
  if (lw.zero) return std::numeric_limits<double>::infinity();
  return alpha * std::log(static_cast<double>(kinf_norm(k))) - lw.log_value;
}

inline double norm_L2(const CoefficientField& v) {
  CompensatedSum acc;
  for (const auto& [key, val] : v) acc.add(val * val);
  return std::sqrt(acc.value());
}

/// sqrt(sum rho_{alpha,b}(k,s)^2 v_{k,s}^2)
inline double norm_A(const CoefficientField& v, double alpha, const WeightSequence& b) {
  require(alpha >= 0.0, "alpha must be nonnegative");
  CompensatedSum acc;
  for (const auto& [key, val] : v) {
    const double r = std::exp(log_rho(alpha, key.k, key.s, b));
    acc.add((r * val) * (r * val));
  }
  return std::sqrt(acc.value());
}

/// sqrt(sum |k|_inf^{2 beta} v_{k,s}^2)
inline double norm_K(const CoefficientField& v, double beta) {
  require(beta >= 0.0, "beta must be nonnegative");
  if (beta == 0.0) return norm_L2(v);
  CompensatedSum acc;
  for (const auto& [key, val] : v) {
    const double t = std::pow(static_cast<double>(kinf_norm(key.k)), beta) * val;
    acc.add(t * t);
  }
  return std::sqrt(acc.value());
}

/// S_T v: the entries with rho_{alpha-beta,b}(k,s) <= T, using the same
/// comparison as hyperbolic-cross membership.
inline CoefficientField project_ST(const CoefficientField& v, double T, double alpha, double beta,
                                   const WeightSequence& b) {
  require(alpha > beta && beta >= 0.0, "need alpha > beta >= 0");
  require(T >= 1.0, "T must be >= 1");
  const double log_T = std::log(T);
  CoefficientField out(v.m());
  for (const auto& [key, val] : v) {
    const LogWeight lw = log_weight_or_zero(key.s, b);
    if (lw.zero) continue;
    if (cross_member(alpha - beta, kinf_norm(key.k), lw.log_value, log_T)) out.set(key.k, key.s, val);
  }
  return out;
}

struct ProjectionReport {
  double lhs = 0.0;  // ||v - S_T v||_{K^beta}
  double rhs = 0.0;  // T^{-1} ||v||_{A^{alpha,b}}
  bool ok = false;
};

inline ProjectionReport check_projection_lemma(const CoefficientField& v, double T, double alpha, double beta,
                                               const WeightSequence& b) {
  ProjectionReport rep;
  rep.lhs = norm_K(difference(v, project_ST(v, T, alpha, beta, b)), beta);
  rep.rhs = norm_A(v, alpha, b) / T;
  rep.ok = rep.lhs <= rep.rhs * (1.0 + 1e-10);
  return rep;
}

}  // namespace hypercross
