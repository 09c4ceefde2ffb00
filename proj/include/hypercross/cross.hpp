#pragma once

// Hyperbolic crosses E_{a,b}(T) = {(k,s) in Z^m_* x F : |k|_inf^a / w(s) <= T}.
// The parametric skeleton {s : w(s) >= 1/T} is enumerated with a pruned
// depth-first walk; k-counts per s are closed form.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hypercross/error.hpp"
#include "hypercross/interval.hpp"
#include "hypercross/multiindex.hpp"
#include "hypercross/sequences.hpp"
#include "hypercross/summability.hpp"
#include "hypercross/weights.hpp"

namespace hypercross {

/// Log-domain slack for every rho <= T comparison.
inline constexpr double kMembershipSlack = 1e-12;

struct CrossParams {
  double a = 1.0;
  std::uint32_t m = 1;
  WeightSequence b;
  double T = 1.0;

  void validate() const {
    require(std::isfinite(a) && a > 0.0, "a must be positive");
    require(m >= 1, "m must be at least 1");
    require(std::isfinite(T) && T >= 1.0, "T must be >= 1");
  }
};

/// |k|_inf^a / w(s) <= T, decided as a ln|k| - ln w <= ln T + slack.
inline bool cross_member(double a, std::uint64_t kinf, double log_w, double log_T) {
  return a * std::log(static_cast<double>(kinf)) - log_w <= log_T + kMembershipSlack;
}

/// Largest k >= 0 with cross_member(a, k, log_w, log_T); 0 when even k = 1 fails.
inline std::uint64_t k_radius(double a, double log_w, double log_T) {
  if (!cross_member(a, 1, log_w, log_T)) return 0;
  const double guess = std::floor(std::exp((log_T + kMembershipSlack + log_w) / a));
  if (!(guess < 9.0e15)) fail(ErrorKind::Overflow, "k radius beyond 2^53");
  std::uint64_t k = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(guess));
  while (k > 1 && !cross_member(a, k, log_w, log_T)) --k;
  while (cross_member(a, k + 1, log_w, log_T)) ++k;
  return k;
}

struct SkeletonEntry {
  MultiIndex s;
  LogWeight log_w;
  std::uint64_t k_radius = 0;
};

struct SkeletonOptions {
  double margin = 1e-6;  // required gap 1 - hi(||b||_1) when no caps are given
  std::optional<std::uint64_t> max_level;
  std::optional<std::uint64_t> max_dim;
  std::uint64_t node_budget = 50'000'000;
};

struct Skeleton {
  std::vector<SkeletonEntry> entries;  // canonical order
  bool truncated = false;              // a cap cut a region that could hold members
};

namespace detail {

/// Depth-first walk over F (children s + v e_j, j > max supp s) collecting
/// every s with w(s) >= 1/T. A subtree over dimensions >= j is dropped when
///   w(s) max_{r>=1} C(n+r, r) tau_j^r < 1/T,   tau_j = sum_{i>=j} b_i,
/// which dominates every completion because sum_{|t|=r} w(t) = tau_j^r.
class SkeletonWalker {
 public:
  SkeletonWalker(const CrossParams& params, const SkeletonOptions& opts)
      : b_(params.b), opts_(opts), a_(params.a), log_T_(std::log(params.T)) {
    const std::size_t j0 = b_.head_size();
    head_suffix_.assign(j0 + 2, 0.0);
    double acc = tail_l1(j0 + 1);
    head_suffix_[j0 + 1] = acc;
    for (std::size_t j = j0; j >= 1; --j) {
      acc = rounding::add_up(acc, b_.head()[j - 1]);
      head_suffix_[j] = acc;
    }
  }

  struct Budget {};

  void run() { visit(0, 0, 0.0); }

  std::vector<SkeletonEntry> take_entries() { return std::move(entries_); }
  bool truncated() const { return truncated_; }

 private:
  // Pruning tests use a generous log slack so rounding in the incremental
  // weights can never drop a member; membership itself is decided exactly.
  static constexpr double kPruneSlack = 1e-9;

  std::uint64_t dim_end() const {
    std::uint64_t e = b_.support_end();
    if (opts_.max_dim) e = std::min<std::uint64_t>(e, *opts_.max_dim);
    return e;
  }

  /// Upper bound on sum_{i >= j} b_i (an integral bracket beyond the head).
  double tail_l1(std::uint64_t j) const {
    const auto* pt = b_.power_tail();
    if (!pt) return 0.0;
    const double lo = static_cast<double>(j) - 0.5;
    return rounding::widen_up(pt->kappa * std::pow(lo, 1.0 - pt->q) / (pt->q - 1.0), 8);
  }

  double tau(std::uint64_t j) const { return j < head_suffix_.size() ? head_suffix_[j] : tail_l1(j); }

  /// ln max_{1 <= r <= rmax} C(n+r, r) t^r.
  static double log_max_completion(std::uint64_t n, double t, std::optional<std::uint64_t> rmax) {
    if (t <= 0.0) return -std::numeric_limits<double>::infinity();
    if (rmax && *rmax == 0) return -std::numeric_limits<double>::infinity();
    const std::uint64_t hi = rmax ? *rmax : std::numeric_limits<std::uint64_t>::max();
    if (!rmax && t >= 1.0) return std::numeric_limits<double>::infinity();
    // Terms increase while r + 1 <= t n / (1 - t).
    double peak = t >= 1.0 ? static_cast<double>(hi) : std::floor(t * static_cast<double>(n) / (1.0 - t));
    peak = std::clamp(peak, 1.0, std::min(static_cast<double>(hi), 1e15));
    const auto r0 = static_cast<std::uint64_t>(peak);
    const double lt = std::log(t);
    double best = -std::numeric_limits<double>::infinity();
    for (std::uint64_t r = r0 > 1 ? r0 - 1 : 1; r <= r0 + 1 && r <= hi; ++r)
      best = std::max(best, log_binomial(n + r, r) + static_cast<double>(r) * lt);
    return best;
  }

  std::optional<std::uint64_t> remaining_levels(std::uint64_t n) const {
    if (!opts_.max_level) return std::nullopt;
    return *opts_.max_level > n ? *opts_.max_level - n : 0;
  }

  /// True when no s + t with t != 0 supported on dims >= j can be a member.
  bool excluded(std::uint64_t n, std::uint64_t j, double lw) const {
    return lw + log_max_completion(n, tau(j), remaining_levels(n)) + log_T_ + kPruneSlack < 0.0;
  }

  void record() {
    MultiIndex s = MultiIndex::from_pairs(path_);
    const LogWeight lw = log_weight(s, b_);
    if (!cross_member(1.0, 1, lw.log_value, log_T_)) return;
    entries_.push_back({std::move(s), lw, k_radius(a_, lw.log_value, log_T_)});
  }

  void visit(std::uint64_t n, std::uint64_t d, double lw) {
    if (++steps_ > opts_.node_budget) throw Budget{};
    if (lw + log_T_ + kPruneSlack >= 0.0) record();
    const std::uint64_t end = dim_end();
    for (std::uint64_t j = d + 1;; ++j) {
      if (++steps_ > opts_.node_budget) throw Budget{};
      if (excluded(n, j, lw)) return;
      if (j > end) {
        // Only reachable under a dimension cap (a zero tail makes tau vanish).
        truncated_ = true;
        return;
      }
      const double bj = b_.value(j);
      const double lbj = std::log(bj);
      const double rest = tau(j + 1);
      const double x = bj / (1.0 - rest);
      for (std::uint64_t v = 1;; ++v) {
        if (opts_.max_level && n + v > *opts_.max_level) {
          // Anything at this depth or below is cut by the level cap.
          if (!level_region_excluded(n, j, v, lw)) truncated_ = true;
          break;
        }
        // Every completion of s + v' e_j (v' >= v) has weight at most
        //   w(s) (1 - rest)^{-(n+1)} C(n+v', v') x^v',
        // which decreases in v' once x (n+v+1)/(v+1) < 1.
        if (rest < 1.0 && x < 1.0) {
          const double nv = static_cast<double>(n + v);
          const double ratio = x * (nv + 1.0) / (static_cast<double>(v) + 1.0);
          const double lb = lw - static_cast<double>(n + 1) * std::log1p(-rest) + log_binomial(n + v, v) +
                            static_cast<double>(v) * std::log(x);
          if (ratio < 1.0 && lb + log_T_ + kPruneSlack < 0.0) break;
        }
        path_.push_back({j, v});
        visit(n + v, j, lw + log_binomial(n + v, v) + static_cast<double>(v) * lbj);
        path_.pop_back();
      }
    }
  }

  /// Under a level cap, whether all s + v' e_j + t' with v' >= v are non-members.
  bool level_region_excluded(std::uint64_t n, std::uint64_t j, std::uint64_t v, double lw) const {
    const double rest = tau(j + 1);
    const double bj = b_.value(j);
    const double x = bj / (1.0 - rest);
    if (!(rest < 1.0 && x < 1.0)) return false;
    const double ratio = x * (static_cast<double>(n + v) + 1.0) / (static_cast<double>(v) + 1.0);
    const double lb = lw - static_cast<double>(n + 1) * std::log1p(-rest) + log_binomial(n + v, v) +
                      static_cast<double>(v) * std::log(x);
    return ratio < 1.0 && lb + log_T_ + kPruneSlack < 0.0;
  }

  const WeightSequence& b_;
  const SkeletonOptions& opts_;
  double a_;
  double log_T_;
  std::vector<double> head_suffix_;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> path_;
  std::vector<SkeletonEntry> entries_;
  std::uint64_t steps_ = 0;
  bool truncated_ = false;
};

}  // namespace detail

/// All s with w(s) >= 1/T, complete and duplicate-free, sorted by (degree, entries).
inline Skeleton skeleton(const CrossParams& params, const SkeletonOptions& opts = {}) {
  params.validate();
  require(opts.margin > 0.0 && opts.margin < 1.0, "margin must lie in (0, 1)");
  const Interval l1 = ell1_norm(params.b);
  // Without the margin only a level cap makes the walk finite.
  const bool capped = opts.max_level.has_value();
  if (!capped && (l1.divergent || l1.hi > 1.0 - opts.margin))
    fail(ErrorKind::MarginViolated, "hi(||b||_1) exceeds 1 - margin; supply a max_level cap");

  detail::SkeletonWalker walker(params, opts);
  try {
    walker.run();
  } catch (const detail::SkeletonWalker::Budget&) {
    fail(ErrorKind::CapExceeded, "skeleton enumeration exceeded its step budget");
  }
  Skeleton out;
  out.truncated = walker.truncated();
  out.entries = walker.take_entries();
  std::sort(out.entries.begin(), out.entries.end(),
            [](const SkeletonEntry& x, const SkeletonEntry& y) { return x.s < y.s; });
  return out;
}

namespace detail {

/// (2 r)^m, or nullopt past 2^63 - 1.
inline std::optional<std::int64_t> k_count(std::uint64_t radius, std::uint32_t m) {
  constexpr auto kMax = static_cast<unsigned __int128>(std::numeric_limits<std::int64_t>::max());
  const unsigned __int128 side = static_cast<unsigned __int128>(radius) * 2;
  unsigned __int128 acc = 1;
  for (std::uint32_t i = 0; i < m; ++i) {
    acc *= side;
    if (acc > kMax) return std::nullopt;
  }
  return static_cast<std::int64_t>(acc);
}

inline std::optional<std::int64_t> count_from_skeleton(const Skeleton& sk, std::uint32_t m) {
  std::int64_t total = 0;
  for (const auto& e : sk.entries) {
    const auto c = k_count(e.k_radius, m);
    if (!c || __builtin_add_overflow(total, *c, &total)) return std::nullopt;
  }
  return total;
}

}  // namespace detail

/// |E_{a,b}(T)| = sum_s (2 floor(T_s))^m; nullopt on int64 overflow.
inline std::optional<std::int64_t> cardinality(const CrossParams& params, const SkeletonOptions& opts = {}) {
  return detail::count_from_skeleton(skeleton(params, opts), params.m);
}

struct CrossEntry {
  std::vector<std::int64_t> k;
  MultiIndex s;
  double log_rho = 0.0;  // a ln|k|_inf - ln w(s)

  friend bool operator==(const CrossEntry& x, const CrossEntry& y) { return x.k == y.k && x.s == y.s; }
};

struct HyperbolicCross {
  CrossParams params;
  std::vector<CrossEntry> entries;  // grouped by s in skeleton order, k lexicographic
  bool truncated = false;
};

/// Explicit list of all (k, s) in E_{a,b}(T); fails with CapExceeded above `cap`.
inline HyperbolicCross materialize(const CrossParams& params, std::uint64_t cap, const SkeletonOptions& opts = {}) {
  const Skeleton sk = skeleton(params, opts);
  const auto count = detail::count_from_skeleton(sk, params.m);
  if (!count) fail(ErrorKind::CapExceeded, "cardinality exceeds 2^63-1");
  if (static_cast<std::uint64_t>(*count) > cap)
    fail(ErrorKind::CapExceeded, "cardinality " + std::to_string(*count) + " exceeds cap " + std::to_string(cap));
  HyperbolicCross out;
  out.params = params;
  out.truncated = sk.truncated;
  out.entries.reserve(static_cast<std::size_t>(*count));
  const std::uint32_t m = params.m;
  for (const auto& e : sk.entries) {
    const auto r = static_cast<std::int64_t>(e.k_radius);
    if (r == 0) continue;
    std::vector<std::int64_t> k(m, -r);
    while (true) {
      std::uint64_t kinf = 0;
      for (auto c : k) kinf = std::max<std::uint64_t>(kinf, static_cast<std::uint64_t>(c < 0 ? -c : c));
      out.entries.push_back({k, e.s, params.a * std::log(static_cast<double>(kinf)) - e.log_w.log_value});
      // Odometer over {-r..-1, 1..r}^m, last component fastest.
      std::size_t i = m;
      while (i > 0) {
        auto& c = k[i - 1];
        c = (c == -1) ? 1 : c + 1;
        if (c <= r) break;
        c = -r;
        --i;
      }
      if (i == 0) break;
    }
  }
  return out;
}

struct CardinalityReport {
  std::optional<std::int64_t> exact;
  double lower_bound = 0.0;  // 2^m (floor(T^{1/a}) - 1)^m, an integer
  Interval constant;         // C = (3/2)^{2m} sum_s w(s)^{m/a}
  Interval upper_bound;      // 2^m C T^{m/a}
  bool lower_ok = false;
  bool upper_ok = false;
  std::size_t skeleton_size = 0;
  bool truncated = false;

  bool satisfied() const { return lower_ok && upper_ok; }
};

namespace detail {

/// Largest integer k with k^a <= T.
inline std::uint64_t floor_root(double T, double a) {
  double k = std::floor(std::pow(T, 1.0 / a));
  while (k > 0.0 && std::pow(k, a) > T) k -= 1.0;
  while (std::pow(k + 1.0, a) <= T) k += 1.0;
  return static_cast<std::uint64_t>(k);
}

inline double closed_form_lower(double T, double a, std::uint32_t m) {
  const double f = static_cast<double>(floor_root(T, a));
  return std::pow(2.0, m) * std::pow(std::max(f - 1.0, 0.0), m);
}

/// 2^m C T^{m/a} from the enclosure of sum_s w(s)^{m/a}.
inline std::pair<Interval, Interval> closed_form_upper(const Interval& sum, double T, double a, std::uint32_t m) {
  Interval c = sum;
  for (std::uint32_t i = 0; i < m; ++i) c = mul_nonneg(c, Interval::exact(2.25));
  const double tp = std::pow(T, static_cast<double>(m) / a);
  const Interval tpow{rounding::widen_down(tp), rounding::widen_up(tp), false};
  Interval up = mul_nonneg(c, tpow);
  up = mul_nonneg(up, Interval::exact(std::ldexp(1.0, static_cast<int>(m))));
  return {c, up};
}

}  // namespace detail

/// Exact |E_{a,b}(T)| against the two-sided bound
///   2^m (floor(T^{1/a}) - 1)^m <= |E| <= 2^m C T^{m/a}.
inline CardinalityReport verify_bounds(const CrossParams& params, double tol, const SkeletonOptions& opts = {},
                                       const SumPowersOptions& sum_opts = {}) {
  params.validate();
  const double p = static_cast<double>(params.m) / params.a;
  const Interval sum = sum_powers(p, params.b, tol, sum_opts);
  const Skeleton sk = skeleton(params, opts);
  CardinalityReport rep;
  rep.exact = detail::count_from_skeleton(sk, params.m);
  rep.skeleton_size = sk.entries.size();
  rep.truncated = sk.truncated;
  rep.lower_bound = detail::closed_form_lower(params.T, params.a, params.m);
  std::tie(rep.constant, rep.upper_bound) = detail::closed_form_upper(sum, params.T, params.a, params.m);
  if (rep.exact) {
    const auto e = static_cast<double>(*rep.exact);
    rep.lower_ok = rep.lower_bound <= e;
    rep.upper_ok = e <= rep.upper_bound.hi;
  }
  return rep;
}

struct EpsDimension {
  std::int64_t lower = 0;  // |E| - 1
  std::int64_t upper = 0;  // |E|
  double closed_lower = 0.0;
  Interval closed_upper;
  Interval constant;
  bool sandwich_ok = false;
};

/// n_eps of the unit ball of A^{alpha,b} in K^beta via |E_{alpha-beta,b}(1/eps)|.
inline EpsDimension eps_dimension(double alpha, double beta, std::uint32_t m, const WeightSequence& b, double eps,
                                  double tol = 1e-6, const SkeletonOptions& opts = {},
                                  const SumPowersOptions& sum_opts = {}) {
  require(beta >= 0.0 && alpha > beta, "need alpha > beta >= 0");
  require(eps > 0.0 && eps <= 1.0, "eps must lie in (0, 1]");
  const CrossParams params{alpha - beta, m, b, 1.0 / eps};
  const CardinalityReport rep = verify_bounds(params, tol, opts, sum_opts);
  if (!rep.exact) fail(ErrorKind::Overflow, "cardinality exceeds 2^63-1");
  EpsDimension out;
  out.upper = *rep.exact;
  out.lower = *rep.exact - 1;
  out.closed_lower = rep.lower_bound;
  out.closed_upper = rep.upper_bound;
  out.constant = rep.constant;
  out.sandwich_ok = rep.satisfied();
  return out;
}

}  // namespace hypercross
