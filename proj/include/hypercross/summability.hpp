#pragma once

// l_p(F)-summability of the factorial-ratio weights w(s) = (|s|_1!/s!) b^s:
// classification from certified norm enclosures, a certified enclosure of
// sum_s w(s)^p, and the witness family used to show divergence when
// ||b||_1 > 1.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hypercross/error.hpp"
#include "hypercross/interval.hpp"
#include "hypercross/multiindex.hpp"
#include "hypercross/sequences.hpp"
#include "hypercross/weights.hpp"

namespace hypercross {

enum class Verdict { Summable, NotSummable, BoundaryUnsupported };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Summable: return "Summable";
    case Verdict::NotSummable: return "NotSummable";
    case Verdict::BoundaryUnsupported: return "BoundaryUnsupported";
  }
  return "Unknown";
}

struct SummabilityVerdict {
  Verdict verdict = Verdict::BoundaryUnsupported;
  std::string rule;
  double p = 1.0;
  Interval ell1;
  Interval ellp;  // enclosure of sum_j b_j^p
};

inline constexpr const char* kRuleSmallP = "p<=1: summable iff ||b||_1 < 1 and b in l_p";
inline constexpr const char* kRuleLargeP = "p>1, infinitely many b_j > 0: summable iff ||b||_1 <= 1";
inline constexpr const char* kRuleTensor = "product weights b^s: summable iff ||b||_inf < 1 and b in l_p";

/// Classifies (w(s))_{s in F} in l_p(F).
inline SummabilityVerdict classify(double p, const WeightSequence& b) {
  require(p > 0.0 && std::isfinite(p), "p must be positive");
  SummabilityVerdict out;
  out.p = p;
  out.ell1 = ell1_norm(b);
  out.ellp = ellp_norm_p(b, p);
  if (p <= 1.0) {
    out.rule = kRuleSmallP;
    if (out.ellp.divergent || out.ell1.divergent || out.ell1.lo >= 1.0)
      out.verdict = Verdict::NotSummable;
    else if (out.ell1.hi < 1.0)
      out.verdict = Verdict::Summable;
    else
      out.verdict = Verdict::BoundaryUnsupported;
    return out;
  }
  if (b.zero_tail())
    fail(ErrorKind::HypothesisViolated,
         "p > 1 needs infinitely many positive b_j; finite sequences are not classified");
  out.rule = kRuleLargeP;
  if (out.ell1.divergent || out.ell1.lo > 1.0)
    out.verdict = Verdict::NotSummable;
  else if (out.ell1.hi <= 1.0)
    out.verdict = Verdict::Summable;
  else
    out.verdict = Verdict::BoundaryUnsupported;
  return out;
}

/// Classifies the product weights (b^s)_{s in F} in l_p(F).
inline SummabilityVerdict classify_tensor(double p, const WeightSequence& b) {
  require(p > 0.0 && std::isfinite(p), "p must be positive");
  SummabilityVerdict out;
  out.p = p;
  out.rule = kRuleTensor;
  out.ell1 = ell1_norm(b);
  out.ellp = ellp_norm_p(b, p);
  // The supremum is a head entry (exact) or the first tail value (one pow call).
  double sup_lo = 0.0, sup_hi = 0.0;
  for (double v : b.head()) sup_lo = sup_hi = std::max(sup_hi, v);
  if (b.power_tail()) {
    const double t = b.value(b.head_size() + 1);
    sup_lo = std::max(sup_lo, rounding::widen_down(t));
    sup_hi = std::max(sup_hi, rounding::widen_up(t));
  }
  if (out.ellp.divergent || sup_lo >= 1.0)
    out.verdict = Verdict::NotSummable;
  else if (sup_hi < 1.0)
    out.verdict = Verdict::Summable;
  else
    out.verdict = Verdict::BoundaryUnsupported;
  return out;
}

namespace detail {

/// Upper bounds for sums of w(s+t)^p over the subtree of t supported on
/// dimensions >= j, given |s|_1 = n and supp(s) below j.
///
/// For p >= 1 the bound is (sum_t w(s+t))^p = w(s)^p (1 - sigma_j)^{-(n+1)p}
/// with sigma_j = sum_{i>=j} b_i. For p < 1, Hoelder's inequality with
/// per-dimension factors mu_i > 1 gives
///   w(s)^p (1 - sum_{i>=j} b_i mu_i)^{-(n+1)p} prod_{i>=j} (1 - z_i)^{-(1-p)},
///   z_i = mu_i^{-p/(1-p)},
/// and mu_i = max(eta, lambda b_i^{p-1}) is optimised over a small grid.
class SubtreeBounds {
 public:
  SubtreeBounds(double p, const WeightSequence& b) : p_(p), b_(b), j0_(b.head_size()) {
    if (p_ >= 1.0) {
      cands_.push_back({1.0, 0.0});
    } else {
      for (double eta : {1.05, 1.25, 1.6, 2.5})
        for (int k = -7; k <= 2; ++k) cands_.push_back({eta, std::ldexp(1.0, k)});
    }
    r_ = p_ < 1.0 ? p_ / (1.0 - p_) : 0.0;
    head_sigma_.assign(cands_.size(), std::vector<double>(j0_ + 2, 0.0));
    head_logp_.assign(cands_.size(), std::vector<double>(j0_ + 2, 0.0));
    for (std::size_t c = 0; c < cands_.size(); ++c) {
      double sigma = tail_sigma(c, j0_ + 1);
      double logp = tail_logp(c, j0_ + 1);
      head_sigma_[c][j0_ + 1] = sigma;
      head_logp_[c][j0_ + 1] = logp;
      for (std::size_t j = j0_; j >= 1; --j) {
        sigma += beta(c, j);
        logp += -std::log1p(-z(c, j));
        head_sigma_[c][j] = sigma;
        head_logp_[c][j] = logp;
      }
    }
  }

  bool zero_tail() const { return b_.zero_tail(); }
  std::size_t head_size() const { return j0_; }
  double p() const { return p_; }

  /// ln of the bound on sum_{t on dims >= j} (w(s+t)/w(s))^p, t = 0 included.
  /// Returns the best candidate index alongside.
  std::pair<double, std::size_t> log_subtree(std::uint64_t n, std::uint64_t j) {
    const std::uint64_t key = (n << 40) ^ j;
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::pair<double, std::size_t> best{std::numeric_limits<double>::infinity(), 0};
    // Deep in the tail the optimal candidate drifts slowly: rescan the grid
    // only at powers of two and otherwise reuse the last winner for this n.
    const bool rescan = j <= j0_ + 64 || (j & (j - 1)) == 0 || n >= last_best_.size() ||
                        last_best_[n] == kNoCandidate;
    if (rescan) {
      for (std::size_t c = 0; c < cands_.size(); ++c) {
        const double v = log_subtree_with(n, j, c);
        if (v < best.first) best = {v, c};
      }
      if (n >= last_best_.size()) last_best_.resize(n + 1, kNoCandidate);
      last_best_[n] = std::isfinite(best.first) ? best.second : kNoCandidate;
    } else {
      best = {log_subtree_with(n, j, last_best_[n]), last_best_[n]};
    }
    memo_.emplace(key, best);
    return best;
  }

  double log_subtree_with(std::uint64_t n, std::uint64_t j, std::size_t c) const {
    const double s = sigma(c, j);
    if (!(s < 1.0)) return std::numeric_limits<double>::infinity();
    double v = -static_cast<double>(n + 1) * p_ * std::log1p(-s);
    if (p_ < 1.0) v += (1.0 - p_) * logp(c, j);
    return v;
  }

  /// ln of the bound on sum over v > vdone and t' on dims > j of
  /// (w(s + v e_j + t')/w(s))^p, with supp(s) below j and |s|_1 = n.
  double log_vtail(std::uint64_t n, std::uint64_t j, std::uint64_t vdone, std::size_t c) const {
    const double rest = sigma(c, j + 1);
    const double bj = beta(c, j);
    if (!(rest + bj < 1.0)) return std::numeric_limits<double>::infinity();
    const double x = bj / (1.0 - rest);
    const double nn = static_cast<double>(n);
    const double v1 = static_cast<double>(vdone + 1);
    const double ratio = x * (nn + v1 + 1.0) / (v1 + 1.0);
    if (!(ratio < 1.0)) return std::numeric_limits<double>::infinity();
    const double log_first = log_binomial(n + vdone + 1, vdone + 1) + v1 * std::log(x);
    double out = p_ * (-(nn + 1.0) * std::log1p(-rest) + log_first - std::log1p(-ratio));
    if (p_ < 1.0) {
      const double zj = z(c, j);
      out += (1.0 - p_) * (v1 * std::log(zj) - std::log1p(-zj) + logp(c, j + 1));
    }
    return out;
  }

 private:
  struct Cand {
    double eta;
    double lambda;
  };

  double value(std::uint64_t j) const { return b_.value(j); }

  /// b_j mu_j
  double beta(std::size_t c, std::uint64_t j) const {
    const double bj = value(j);
    if (p_ >= 1.0) return bj;
    return std::max(cands_[c].eta * bj, cands_[c].lambda * std::pow(bj, p_));
  }

  /// mu_j^{-p/(1-p)}
  double z(std::size_t c, std::uint64_t j) const {
    const double bj = value(j);
    return std::min(std::pow(cands_[c].eta, -r_), std::pow(cands_[c].lambda, -r_) * std::pow(bj, p_));
  }

  double sigma(std::size_t c, std::uint64_t j) const {
    return j <= j0_ + 1 ? head_sigma_[c][j] : tail_sigma(c, j);
  }
  double logp(std::size_t c, std::uint64_t j) const {
    return j <= j0_ + 1 ? head_logp_[c][j] : tail_logp(c, j);
  }

  /// Midpoint-rule bound for a convex power: sum_{i=a}^{e-1} k i^-x <= k int_{a-1/2}^{e-1/2} t^-x dt.
  static double power_range(double k, double x, double a, double e) {
    const double lo = a - 0.5;
    if (std::isinf(e)) return k * std::pow(lo, 1.0 - x) / (x - 1.0);
    if (x == 1.0) return k * std::log((e - 0.5) / lo);
    return k * (std::pow(lo, 1.0 - x) - std::pow(e - 0.5, 1.0 - x)) / (x - 1.0);
  }

  /// First tail index at which lambda b_i^{p-1} >= eta, never below j.
  double split_index(std::size_t c, std::uint64_t j) const {
    const auto* pt = b_.power_tail();
    const double bt = std::pow(cands_[c].lambda / cands_[c].eta, 1.0 / (1.0 - p_));
    const double xs = std::pow(pt->kappa / bt, 1.0 / pt->q);
    return std::max(static_cast<double>(j), std::ceil(xs));
  }

  double tail_sigma(std::size_t c, std::uint64_t j) const {
    const auto* pt = b_.power_tail();
    if (!pt) return 0.0;
    const double jj = static_cast<double>(j);
    constexpr double kInf = std::numeric_limits<double>::infinity();
    double out;
    if (p_ >= 1.0) {
      out = power_range(pt->kappa, pt->q, jj, kInf);
    } else {
      const double is = split_index(c, j);
      out = (is > jj ? power_range(cands_[c].eta * pt->kappa, pt->q, jj, is) : 0.0) +
            power_range(cands_[c].lambda * std::pow(pt->kappa, p_), p_ * pt->q, is, kInf);
    }
    return out * (1.0 + 1e-12);
  }

  double tail_logp(std::size_t c, std::uint64_t j) const {
    const auto* pt = b_.power_tail();
    if (!pt || p_ >= 1.0) return 0.0;
    const double jj = static_cast<double>(j);
    const double zmax = std::pow(cands_[c].eta, -r_);
    const double is = split_index(c, j);
    const double flat = (is - jj) * -std::log1p(-zmax);
    const double k = std::pow(cands_[c].lambda, -r_) * std::pow(pt->kappa, p_);
    const double decaying = power_range(k, p_ * pt->q, is, std::numeric_limits<double>::infinity()) / (1.0 - zmax);
    return (flat + decaying) * (1.0 + 1e-12);
  }

  double p_;
  const WeightSequence& b_;
  std::size_t j0_;
  double r_ = 0.0;
  std::vector<Cand> cands_;
  std::vector<std::vector<double>> head_sigma_, head_logp_;
  std::unordered_map<std::uint64_t, std::pair<double, std::size_t>> memo_;
  static constexpr std::size_t kNoCandidate = static_cast<std::size_t>(-1);
  std::vector<std::size_t> last_best_;
};

/// Depth-first walk over F: node s with largest support dimension d has the
/// children s + v e_j for j > d, v >= 1, so every s is visited at most once.
/// Subtrees whose certified bound falls below `theta` are cut and their bound
/// is accumulated into `cut`.
class PowerSumWalker {
 public:
  PowerSumWalker(SubtreeBounds& bounds, const WeightSequence& b, double theta, std::uint64_t budget)
      : bounds_(bounds), b_(b), theta_(theta), budget_(budget) {}

  struct Budget {};

  void run() { visit(0, 0, 0.0); }

  double exact() const { return exact_.value(); }
  double cut() const { return cut_.value(); }
  /// Nodes plus dimension steps taken; this is what the budget limits.
  std::uint64_t nodes() const { return nodes_; }

 private:
  double p() const { return bounds_.p(); }

  void visit(std::uint64_t n, std::uint64_t d, double lw) {
    if (++nodes_ > budget_) throw Budget{};
    exact_.add(std::exp(p() * lw));
    const double lwp = p() * lw;
    for (std::uint64_t j = d + 1;; ++j) {
      if (bounds_.zero_tail() && j > bounds_.head_size()) return;
      if (++nodes_ > budget_) throw Budget{};
      const auto [lf, cand] = bounds_.log_subtree(n, j);
      const double g = std::isfinite(lf) ? std::exp(lwp + std::log(std::expm1(lf))) : lf;
      if (g <= theta_) {
        cut_.add(g);
        return;
      }
      const double all = std::exp(lwp + bounds_.log_vtail(n, j, 0, cand));
      if (all <= theta_) {
        cut_.add(all);
        continue;
      }
      const double lbj = std::log(b_.value(j));
      for (std::uint64_t v = 1;; ++v) {
        visit(n + v, j, lw + log_binomial(n + v, v) + static_cast<double>(v) * lbj);
        const double rest = std::exp(lwp + bounds_.log_vtail(n, j, v, cand));
        if (rest <= theta_) {
          cut_.add(rest);
          break;
        }
      }
    }
  }

  SubtreeBounds& bounds_;
  const WeightSequence& b_;
  double theta_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  CompensatedSum exact_, cut_;
};

}  // namespace detail

struct SumPowersOptions {
  std::uint64_t node_budget = 10'000'000;  // nodes plus dimension steps, over all rounds
  int max_rounds = 24;
};

/// Certified enclosure of sum_{s in F} w(s)^p of relative width <= tol.
/// Requires hi(||b||_1) < 1; the boundary ||b||_1 = 1 is summable for p > 1
/// but is reported as TailBoundInconclusive since no geometric tail exists.
inline Interval sum_powers(double p, const WeightSequence& b, double tol, SumPowersOptions opts = {}) {
  require(p > 0.0 && std::isfinite(p), "p must be positive");
  require(tol > 0.0, "tol must be positive");
  const Interval l1 = ell1_norm(b);
  if (l1.divergent) fail(ErrorKind::Divergent, "||b||_1 diverges");
  if (p < 1.0 && ellp_norm_p(b, p).divergent) fail(ErrorKind::Divergent, "b is not in l_p");
  if (!(l1.hi < 1.0))
    fail(ErrorKind::TailBoundInconclusive, "||b||_1 enclosure reaches 1; summable at most, not enumerable");

  detail::SubtreeBounds bounds(p, b);
  double theta = 0.5 * tol;  // the sum is at least w(0) = 1
  std::uint64_t used = 0;
  for (int round = 0; round < opts.max_rounds; ++round) {
    detail::PowerSumWalker walker(bounds, b, theta, opts.node_budget - used);
    try {
      walker.run();
    } catch (const detail::PowerSumWalker::Budget&) {
      fail(ErrorKind::TailBoundInconclusive, "node budget exhausted before reaching the requested width");
    }
    used += walker.nodes();
    const double lo = walker.exact() * (1.0 - 1e-12);
    const double hi = (walker.exact() + walker.cut() * (1.0 + 1e-9)) * (1.0 + 1e-12);
    if (!std::isfinite(hi)) fail(ErrorKind::TailBoundInconclusive, "subtree bound is not finite");
    const Interval out{lo, hi, false};
    if (out.width() <= tol * out.mid()) return out;
    const double shrink = 0.5 * tol * lo / std::max(walker.cut(), 1e-300);
    theta *= std::clamp(shrink, 1e-3, 0.5);
  }
  fail(ErrorKind::TailBoundInconclusive, "no refinement round reached the requested width");
}

/// s*_j = floor(scale b_j / B) + 1 for j <= J, where J is the shortest prefix
/// with B = b_1 + ... + b_J certified above 1.
inline MultiIndex divergence_witness(const WeightSequence& b, std::uint64_t scale) {
  require(scale >= 1, "scale must be a positive integer");
  const Interval l1 = ell1_norm(b);
  if (!l1.divergent && l1.hi <= 1.0) fail(ErrorKind::NoFinitePrefix, "||b||_1 <= 1: no prefix exceeds 1");
  constexpr std::uint64_t kMaxPrefix = 100'000'000;
  double lo = 0.0, sum = 0.0;
  std::uint64_t jmax = 0;
  for (std::uint64_t j = 1; j <= std::min<std::uint64_t>(b.support_end(), kMaxPrefix); ++j) {
    const double bj = b.value(j);
    lo = rounding::add_down(lo, j > b.head_size() ? rounding::widen_down(bj) : bj);
    sum += bj;
    if (lo > 1.0) {
      jmax = j;
      break;
    }
  }
  if (jmax == 0) fail(ErrorKind::NoFinitePrefix, "no prefix sum certified above 1");
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
  for (std::uint64_t j = 1; j <= jmax; ++j) {
    const double r = std::floor(static_cast<double>(scale) * b.value(j) / sum);
    pairs.emplace_back(j, static_cast<std::uint64_t>(r) + 1);
  }
  return MultiIndex::from_pairs(std::move(pairs));
}

}  // namespace hypercross
