#pragma once

// Reference solutions by collocation in y: at each quadrature node the
// deterministic problem with a(., y) is solved by Fourier-Galerkin, and
// Bochner norms over I^J are approximated by the quadrature rule.

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "hypercross/error.hpp"
#include "hypercross/interval.hpp"
#include "hypercross/multiindex.hpp"
#include "hypercross/parallel.hpp"
#include "hypercross/pde/galerkin.hpp"
#include "hypercross/pde/legendre.hpp"
#include "hypercross/pde/trig.hpp"
#include "hypercross/tensorfield.hpp"

namespace hypercross::pde {

inline constexpr std::uint64_t kMonteCarloSeed = 0xC0FFEE;

struct ReferenceOptions {
  std::int64_t spatial_modes = 0;  // |k|_inf cutoff; 0 picks 2 max(maxfreq(f), 8)
  std::uint32_t min_points = 4;    // Gauss points per dimension to start from
  std::uint32_t max_points = 32;
  double tolerance = 1e-8;         // relative change of the norm under doubling
  std::size_t max_gauss_dims = 4;  // beyond this, Monte Carlo
  std::size_t mc_samples = 4096;
  std::uint64_t seed = kMonteCarloSeed;
  SolveOptions solver{};
};

struct ReferenceSolution {
  std::uint32_t m = 1;
  std::size_t J = 0;
  std::int64_t spatial_modes = 0;
  std::vector<Freq> freqs;                 // spatial basis, torus_index order
  std::vector<std::vector<double>> nodes;  // y points
  std::vector<double> weights;             // sum to 1
  std::vector<Eigen::VectorXd> values;     // u(., y_i) on freqs
  std::uint32_t points_per_dim = 0;        // 0 for Monte Carlo
  bool monte_carlo = false;
  double norm_V = 0.0;

  std::size_t position(const Freq& k) const {
    auto it = std::lower_bound(freqs.begin(), freqs.end(), k);
    if (it == freqs.end() || *it != k)
      fail(ErrorKind::InvalidArgument, "frequency outside the reference spatial basis");
    return static_cast<std::size_t>(it - freqs.begin());
  }
};

/// (2 pi)^2 |k|_2^2, the V-norm weight of phi_k.
inline double v_weight(const Freq& k) { return kTwoPi * kTwoPi * norm2_sq(k); }

namespace detail {

struct AffineOperator {
  std::vector<Freq> freqs;
  SparseMatrix A0;
  std::vector<SparseMatrix> Aj;
  Eigen::VectorXd F;
};

inline AffineOperator affine_operator(const ProblemSpec& spec, std::int64_t modes) {
  AffineOperator op;
  op.freqs = torus_index(spec.m, modes);
  op.A0 = spatial_stiffness(spec.abar, op.freqs);
  for (const auto& p : spec.psi) op.Aj.push_back(spatial_stiffness(p, op.freqs));
  op.F.resize(static_cast<Eigen::Index>(op.freqs.size()));
  for (std::size_t i = 0; i < op.freqs.size(); ++i) op.F[static_cast<Eigen::Index>(i)] = real_load(spec.f, op.freqs[i]);
  return op;
}

inline std::vector<Eigen::VectorXd> solve_nodes(const AffineOperator& op, const std::vector<std::vector<double>>& nodes,
                                                const SolveOptions& solver) {
  std::vector<Eigen::VectorXd> out(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    SparseMatrix A = op.A0;
    for (std::size_t j = 0; j < op.Aj.size(); ++j) A += nodes[i][j] * op.Aj[j];
    out[i] = cg_solve(A, op.F, solver);
  });
  return out;
}

inline double weighted_v_norm(const std::vector<Freq>& freqs, const Eigen::VectorXd& v) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    const double x = v[static_cast<Eigen::Index>(i)];
    acc.add(v_weight(freqs[i]) * x * x);
  }
  return acc.value();
}

inline double bochner_norm(const std::vector<Freq>& freqs, const std::vector<double>& weights,
                           const std::vector<Eigen::VectorXd>& values) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < values.size(); ++i) acc.add(weights[i] * weighted_v_norm(freqs, values[i]));
  return std::sqrt(acc.value());
}

inline void tensor_rule(std::size_t J, std::uint32_t n, std::vector<std::vector<double>>& nodes,
                        std::vector<double>& weights) {
  const GaussRule g = gauss_legendre(n);
  nodes.clear();
  weights.clear();
  std::vector<std::uint32_t> idx(J, 0);
  while (true) {
    std::vector<double> y(J);
    double w = 1.0;
    for (std::size_t j = 0; j < J; ++j) {
      y[j] = g.nodes[idx[j]];
      w *= g.weights[idx[j]];
    }
    nodes.push_back(std::move(y));
    weights.push_back(w);
    std::size_t j = 0;
    while (j < J && ++idx[j] == n) idx[j++] = 0;
    if (j == J) break;
  }
}

/// Uniform on [-1, 1] from the top 53 bits, independent of the standard
/// library's distribution implementation.
inline double uniform_pm1(std::mt19937_64& rng) {
  return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

}  // namespace detail

inline std::int64_t default_spatial_modes(const ProblemSpec& spec) {
  return 2 * std::max<std::int64_t>(spec.f.max_frequency(), 8);
}

/// Collocation reference. Tensor Gauss-Legendre points are doubled until the
/// Bochner V-norm changes by less than opts.tolerance; J > max_gauss_dims
/// switches to Monte Carlo with a fixed seed.
inline ReferenceSolution reference_solution(const ProblemSpec& spec, const ReferenceOptions& opts = {}) {
  spec.validate();
  ReferenceSolution ref;
  ref.m = spec.m;
  ref.J = spec.J();
  ref.spatial_modes = opts.spatial_modes > 0 ? opts.spatial_modes : default_spatial_modes(spec);
  const detail::AffineOperator op = detail::affine_operator(spec, ref.spatial_modes);
  ref.freqs = op.freqs;

  if (ref.J == 0) {
    ref.nodes = {{}};
    ref.weights = {1.0};
    ref.values = detail::solve_nodes(op, ref.nodes, opts.solver);
  } else if (ref.J > opts.max_gauss_dims) {
    ref.monte_carlo = true;
    std::mt19937_64 rng(opts.seed);
    ref.nodes.resize(opts.mc_samples);
    for (auto& y : ref.nodes) {
      y.resize(ref.J);
      for (auto& v : y) v = detail::uniform_pm1(rng);
    }
    ref.weights.assign(opts.mc_samples, 1.0 / static_cast<double>(opts.mc_samples));
    ref.values = detail::solve_nodes(op, ref.nodes, opts.solver);
  } else {
    require(opts.min_points >= 1 && opts.max_points >= opts.min_points, "invalid Gauss point range");
    std::uint32_t n = opts.min_points;
    detail::tensor_rule(ref.J, n, ref.nodes, ref.weights);
    ref.values = detail::solve_nodes(op, ref.nodes, opts.solver);
    double norm = detail::bochner_norm(ref.freqs, ref.weights, ref.values);
    while (true) {
      if (2 * n > opts.max_points)
        fail(ErrorKind::NonConvergence, "reference quadrature did not settle within " +
                                            std::to_string(opts.max_points) + " points per dimension");
      std::vector<std::vector<double>> nodes;
      std::vector<double> weights;
      detail::tensor_rule(ref.J, 2 * n, nodes, weights);
      auto values = detail::solve_nodes(op, nodes, opts.solver);
      const double next = detail::bochner_norm(ref.freqs, weights, values);
      n *= 2;
      ref.nodes = std::move(nodes);
      ref.weights = std::move(weights);
      ref.values = std::move(values);
      const bool settled = std::abs(next - norm) <= opts.tolerance * next;
      norm = next;
      if (settled) break;
    }
    ref.points_per_dim = n;
  }
  ref.norm_V = detail::bochner_norm(ref.freqs, ref.weights, ref.values);
  return ref;
}

/// ||u - u_G||_{L_2(I^J, V, mu)} by the reference quadrature, with u_G(., y)
/// the Legendre expansion evaluated at each node.
inline double error_V(const CoefficientField& uG, const ReferenceSolution& ref) {
  require(uG.m() == ref.m, "field and reference live on different tori");
  struct Term {
    std::size_t pos;
    double value;
  };
  std::map<MultiIndex, std::vector<Term>> by_s;
  std::uint64_t maxdeg = 0;
  for (const auto& [key, val] : uG) {
    if (key.s.max_dim() > ref.J)
      fail(ErrorKind::DimensionOutOfRange, "field uses a parameter beyond the reference dimension");
    by_s[key.s].push_back({ref.position(key.k), val});
    for (const auto& e : key.s.entries()) maxdeg = std::max<std::uint64_t>(maxdeg, e.exp);
  }
  std::vector<double> part(ref.nodes.size());
  parallel_for(ref.nodes.size(), [&](std::size_t i) {
    std::vector<std::vector<double>> tables(ref.J);
    for (std::size_t j = 0; j < ref.J; ++j) tables[j] = legendre_values(ref.nodes[i][j], maxdeg);
    Eigen::VectorXd diff = ref.values[i];
    for (const auto& [s, terms] : by_s) {
      const double L = legendre_product(s, tables);
      for (const auto& t : terms) diff[static_cast<Eigen::Index>(t.pos)] -= L * t.value;
    }
    part[i] = ref.weights[i] * detail::weighted_v_norm(ref.freqs, diff);
  });
  CompensatedSum acc;
  for (double p : part) acc.add(p);
  return std::sqrt(acc.value());
}

/// u_s(.) = sum_i w_i u(., y_i) L_s(y_i)
inline Eigen::VectorXd legendre_coefficient(const ReferenceSolution& ref, const MultiIndex& s) {
  require(s.max_dim() <= ref.J, "multi-index uses a parameter beyond the reference dimension");
  if (!ref.monte_carlo)
    for (const auto& e : s.entries())
      if (e.exp + 2 > ref.points_per_dim && ref.J > 0)
        fail(ErrorKind::QuadratureDegree, "degree " + std::to_string(e.exp) + " in y_" + std::to_string(e.dim) +
                                              " exceeds the capacity of a " + std::to_string(ref.points_per_dim) +
                                              "-point rule");
  std::uint64_t maxdeg = 0;
  for (const auto& e : s.entries()) maxdeg = std::max<std::uint64_t>(maxdeg, e.exp);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ref.freqs.size()));
  for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
    std::vector<std::vector<double>> tables(ref.J);
    for (std::size_t j = 0; j < ref.J; ++j) tables[j] = legendre_values(ref.nodes[i][j], maxdeg);
    out += (ref.weights[i] * legendre_product(s, tables)) * ref.values[i];
  }
  return out;
}

/// The L_2-orthogonal projection of the reference onto span{phi_k L_s}.
inline CoefficientField project_reference(const ReferenceSolution& ref, std::span<const FieldKey> index) {
  std::map<MultiIndex, Eigen::VectorXd> cache;
  CoefficientField out(ref.m);
  for (const auto& key : index) {
    auto it = cache.find(key.s);
    if (it == cache.end()) it = cache.emplace(key.s, legendre_coefficient(ref, key.s)).first;
    out.set(key.k, key.s, it->second[static_cast<Eigen::Index>(ref.position(key.k))]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Decay of Legendre coefficients

struct DecaySequences {
  double K = 0.0;
  std::vector<double> d;
};

/// Upper bound on |a|_{L_inf(I^J, W^1_inf)} = max_i sup |d a / d x_i|.
inline double coefficient_w_seminorm(const ProblemSpec& spec) {
  double out = 0.0;
  for (std::size_t i = 0; i < spec.m; ++i) {
    double acc = spec.abar.partial_sup_bound(i);
    for (const auto& p : spec.psi) acc += p.partial_sup_bound(i);
    out = std::max(out, acc);
  }
  return out;
}

/// ||u_s||_V <= K (|s|!/s!) d^s with K = ||f||_{V'}/r and d_j = a_j/ln 2,
/// where a_j = ||psi_j||_inf / r bounds the y_j-derivatives of a relative to r.
inline DecaySequences decay_V(const ProblemSpec& spec, const Ellipticity& ell) {
  DecaySequences out;
  out.K = spec.f.dual_norm() / ell.r;
  for (const auto& p : spec.psi) out.d.push_back(p.sup_bound() / (ell.r * std::numbers::ln2));
  return out;
}

/// ||u_s||_W <= K (|s|!/s!) d^s with K = (2 + |a|/r) ||f||_{L_2} / r and
/// d_j = ((|a|/r + 2) ||psi_j||_inf + |psi_j|_{W_inf}) / (r sqrt 3).
inline DecaySequences decay_W(const ProblemSpec& spec, const Ellipticity& ell) {
  const double a = coefficient_w_seminorm(spec);
  DecaySequences out;
  out.K = (2.0 + a / ell.r) * spec.f.l2_norm() / ell.r;
  for (const auto& p : spec.psi)
    out.d.push_back(((a / ell.r + 2.0) * p.sup_bound() + p.w_seminorm_bound()) / (ell.r * std::sqrt(3.0)));
  return out;
}

/// K (|s|!/s!) d^s
inline double decay_bound(const DecaySequences& seq, const MultiIndex& s) {
  double lg = log_multinomial(s);
  for (const auto& e : s.entries()) {
    require(e.dim <= seq.d.size(), "multi-index uses a dimension without a d_j");
    lg += static_cast<double>(e.exp) * std::log(seq.d[e.dim - 1]);
  }
  return seq.K * std::exp(lg);
}

struct DecayRow {
  MultiIndex s;
  double norm = 0.0;  // estimated ||u_s||_V
  double bound = 0.0;
  double ratio = 0.0;
};

inline std::vector<DecayRow> coefficient_decay_check(const ReferenceSolution& ref, const DecaySequences& seq,
                                                     std::span<const MultiIndex> s_list) {
  std::vector<DecayRow> out;
  for (const auto& s : s_list) {
    const Eigen::VectorXd us = legendre_coefficient(ref, s);
    DecayRow row{s, std::sqrt(detail::weighted_v_norm(ref.freqs, us)), decay_bound(seq, s), 0.0};
    row.ratio = row.norm / row.bound;
    out.push_back(std::move(row));
  }
  return out;
}

/// All s supported in 1..J with |s|_1 <= max_degree, in canonical order.
inline std::vector<MultiIndex> multi_indices_up_to(std::size_t J, std::uint64_t max_degree) {
  std::vector<MultiIndex> out{MultiIndex{}};
  for (std::size_t i = 0; i < out.size(); ++i) {
    const MultiIndex s = out[i];
    if (s.degree() == max_degree) continue;
    for (std::size_t j = std::max<std::size_t>(s.max_dim(), 1); j <= J; ++j) out.push_back(s.incremented(j));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace hypercross::pde
