#pragma once

// Stochastic Galerkin discretisation of
//   -div(a(x,y) grad u) = f on T^m,  a(x,y) = abar(x) + sum_j y_j psi_j(x),
// in the real basis phi_k(x) L_s(y) with
//   phi_k = sqrt(2) cos(2 pi k.x)   if the first nonzero k_i > 0,
//   phi_k = sqrt(2) sin(2 pi |k|.x) otherwise (|k| = -k),
// so the system is real symmetric positive definite.

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hypercross/cross.hpp"
#include "hypercross/error.hpp"
#include "hypercross/multiindex.hpp"
#include "hypercross/parallel.hpp"
#include "hypercross/pde/legendre.hpp"
#include "hypercross/pde/trig.hpp"
#include "hypercross/tensorfield.hpp"

namespace hypercross::pde {

struct ProblemSpec {
  std::uint32_t m = 1;
  TrigFunction abar{1};
  std::vector<TrigFunction> psi;
  TrigFunction f{1};
  std::optional<double> r;  // stated ellipticity bounds; certified when absent
  std::optional<double> R;

  std::size_t J() const { return psi.size(); }

  void validate() const {
    require(m >= 1, "m must be at least 1");
    require(abar.m() == m && f.m() == m, "abar and f must live on T^m");
    for (const auto& p : psi) require(p.m() == m, "every psi_j must live on T^m");
    require(f.mean() == 0.0, "f must have zero mean");
    if (r) require(*r > 0.0, "r must be positive");
    if (R && r) require(*R >= *r, "R must be >= r");
  }

  /// abar + sum_j y_j psi_j
  TrigFunction coefficient_at(std::span<const double> y) const {
    TrigFunction a = abar;
    for (std::size_t j = 0; j < psi.size(); ++j) a = a.plus_scaled(psi[j], y[j]);
    return a;
  }
};

struct Ellipticity {
  double r = 0.0;  // certified lower bound of abar - sum_j |psi_j|
  double R = 0.0;  // certified upper bound of abar + sum_j |psi_j|
};

inline std::uint32_t default_grid(std::uint32_t m) { return m == 1 ? 8192 : m == 2 ? 512 : m == 3 ? 64 : 16; }

/// Certified range of a(x,y) over T^m x [-1,1]^J from grid sampling of
/// abar -/+ sum_j |psi_j| with a Lipschitz margin.
inline Ellipticity certify_ellipticity(const ProblemSpec& spec, std::uint32_t grid = 0) {
  spec.validate();
  if (grid == 0) grid = default_grid(spec.m);
  std::vector<double> lip(spec.m);
  for (std::size_t i = 0; i < spec.m; ++i) {
    lip[i] = spec.abar.partial_sup_bound(i);
    for (const auto& p : spec.psi) lip[i] += p.partial_sup_bound(i);
  }
  auto spread = [&](std::span<const double> x) {
    double s = 0.0;
    for (const auto& p : spec.psi) s += std::abs(p(x));
    return s;
  };
  const Interval lo = certified_range(spec.m, grid, lip, [&](std::span<const double> x) { return spec.abar(x) - spread(x); });
  const Interval hi = certified_range(spec.m, grid, lip, [&](std::span<const double> x) { return spec.abar(x) + spread(x); });
  return {lo.lo, hi.hi};
}

/// The (r, R) used downstream: stated values are checked against the
/// certified range, missing ones are filled in from it.
inline Ellipticity ellipticity(const ProblemSpec& spec, std::uint32_t grid = 0) {
  const Ellipticity cert = certify_ellipticity(spec, grid);
  if (!(cert.r > 0.0)) fail(ErrorKind::NotElliptic, "abar - sum |psi_j| is not certified positive");
  Ellipticity out = cert;
  if (spec.r) {
    if (*spec.r > cert.r) fail(ErrorKind::NotElliptic, "stated r exceeds the certified lower bound");
    out.r = *spec.r;
  }
  if (spec.R) {
    if (*spec.R < cert.R) fail(ErrorKind::NotElliptic, "stated R is below the certified upper bound");
    out.R = *spec.R;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spatial stiffness

/// int_T c grad e_k . grad conj(e_k2) dx = (2 pi)^2 (k.k2) c^_{k2-k}.
inline std::complex<double> stiffness_entry(const TrigFunction& c, const Freq& k, const Freq& k2) {
  Freq d(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) d[i] = k2[i] - k[i];
  return kTwoPi * kTwoPi * dot(k, k2) * c.fourier(d);
}

/// phi_k as a combination of two exponentials.
inline std::array<std::pair<Freq, std::complex<double>>, 2> real_basis_expansion(const Freq& k) {
  const double h = std::sqrt(0.5);
  if (freq_sign(k) > 0) return {{{k, h}, {negated(k), h}}};
  const Freq kk = negated(k);
  return {{{kk, std::complex<double>(0.0, -h)}, {negated(kk), std::complex<double>(0.0, h)}}};
}

/// int_T c grad phi_k . grad phi_l dx
inline double real_stiffness(const TrigFunction& c, const Freq& k, const Freq& l) {
  std::complex<double> acc = 0.0;
  for (const auto& [p, ap] : real_basis_expansion(k))
    for (const auto& [q, bq] : real_basis_expansion(l)) acc += ap * std::conj(bq) * stiffness_entry(c, p, q);
  return acc.real();
}

/// int_T f phi_k dx
inline double real_load(const TrigFunction& f, const Freq& k) {
  std::complex<double> acc = 0.0;
  for (const auto& [p, ap] : real_basis_expansion(k)) acc += ap * f.fourier(negated(p));
  return acc.real();
}

/// Calls emit(i, col, value) for every nonzero real_stiffness(c, rows[i], l)
/// with l a key of `cols`, visiting only frequencies that c can couple.
template <class Emit>
void stiffness_block(const TrigFunction& c, std::span<const Freq> rows, const std::map<Freq, std::size_t>& cols,
                     Emit&& emit) {
  std::vector<Freq> shifts;
  for (const auto& [d, cs] : c.modes()) {
    shifts.push_back(d);
    if (freq_sign(d) != 0) shifts.push_back(negated(d));
  }
  std::vector<std::size_t> seen;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    seen.clear();
    const Freq& k = rows[i];
    const Freq kk = freq_sign(k) > 0 ? k : negated(k);
    for (const Freq& p : {kk, negated(kk)}) {
      for (const Freq& d : shifts) {
        Freq q(p.size());
        for (std::size_t t = 0; t < p.size(); ++t) q[t] = p[t] + d[t];
        if (freq_sign(q) == 0) continue;
        for (const Freq& l : {q, negated(q)}) {
          auto it = cols.find(l);
          if (it == cols.end()) continue;
          if (std::find(seen.begin(), seen.end(), it->second) != seen.end()) continue;
          seen.push_back(it->second);
          const double v = real_stiffness(c, k, l);
          if (v != 0.0) emit(i, it->second, v);
        }
      }
    }
  }
}

/// {k in Z^m : all k_i != 0, |k|_inf <= radius} in lexicographic order.
inline std::vector<Freq> torus_index(std::uint32_t m, std::int64_t radius) {
  std::vector<Freq> out;
  if (radius < 1) return out;
  Freq k(m, -radius);
  while (true) {
    out.push_back(k);
    std::size_t i = m;
    while (i > 0) {
      auto& c = k[i - 1];
      c = (c == -1) ? 1 : c + 1;
      if (c <= radius) break;
      c = -radius;
      --i;
    }
    if (i == 0) break;
  }
  return out;
}

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Sparse int c grad phi_k . grad phi_l over one frequency list.
inline SparseMatrix spatial_stiffness(const TrigFunction& c, std::span<const Freq> index) {
  std::map<Freq, std::size_t> pos;
  for (std::size_t i = 0; i < index.size(); ++i) pos.emplace(index[i], i);
  std::vector<Eigen::Triplet<double>> trip;
  stiffness_block(c, index, pos, [&](std::size_t i, std::size_t j, double v) {
    trip.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
  });
  SparseMatrix A(static_cast<Eigen::Index>(index.size()), static_cast<Eigen::Index>(index.size()));
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

// ---------------------------------------------------------------------------
// Parametric system

struct GalerkinSystem {
  std::uint32_t m = 1;
  std::vector<FieldKey> index;
  SparseMatrix A;
  Eigen::VectorXd F;
};

/// B(phi_k L_s, phi_l L_t) over the index set: abar couples t = s, psi_j
/// couples t = s +- e_j with weight c_upper(min(s_j, t_j)).
inline GalerkinSystem assemble(const ProblemSpec& spec, std::vector<FieldKey> index) {
  spec.validate();
  const std::size_t J = spec.J();
  std::map<MultiIndex, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto& key = index[i];
    require(key.k.size() == spec.m, "index frequency has the wrong dimension");
    for (auto c : key.k) require(c != 0, "index frequencies must have nonzero components");
    if (key.s.max_dim() > J)
      fail(ErrorKind::DimensionOutOfRange, "index uses parameter dimension " + std::to_string(key.s.max_dim()) +
                                               " but only " + std::to_string(J) + " psi_j are given");
    groups[key.s].push_back(i);
  }
  struct Group {
    const MultiIndex* s;
    std::vector<Freq> ks;
    std::vector<std::size_t> rows;
    std::map<Freq, std::size_t> pos;  // frequency -> global row
  };
  std::vector<Group> gs;
  for (auto& [s, rows] : groups) {
    Group g{&s, {}, rows, {}};
    for (auto r : rows) {
      g.ks.push_back(index[r].k);
      if (!g.pos.emplace(index[r].k, r).second) require(false, "duplicate (k, s) in index set");
    }
    gs.push_back(std::move(g));
  }
  std::map<MultiIndex, std::size_t> group_of;
  for (std::size_t g = 0; g < gs.size(); ++g) group_of.emplace(*gs[g].s, g);

  std::vector<std::vector<Eigen::Triplet<double>>> parts(gs.size());
  parallel_for(gs.size(), [&](std::size_t g) {
    auto& out = parts[g];
    const Group& G = gs[g];
    stiffness_block(spec.abar, G.ks, G.pos, [&](std::size_t i, std::size_t col, double v) {
      const std::size_t row = G.rows[i];
      if (col < row) return;
      out.emplace_back(static_cast<int>(row), static_cast<int>(col), v);
      if (col != row) out.emplace_back(static_cast<int>(col), static_cast<int>(row), v);
    });
    for (std::size_t j = 1; j <= J; ++j) {
      auto it = group_of.find(G.s->incremented(j));
      if (it == group_of.end()) continue;
      const Group& H = gs[it->second];
      const double w = legendre_upper((*G.s)[j]);
      stiffness_block(spec.psi[j - 1], G.ks, H.pos, [&](std::size_t i, std::size_t col, double v) {
        const std::size_t row = G.rows[i];
        out.emplace_back(static_cast<int>(row), static_cast<int>(col), w * v);
        out.emplace_back(static_cast<int>(col), static_cast<int>(row), w * v);
      });
    }
  });
  std::vector<Eigen::Triplet<double>> trip;
  for (auto& p : parts) trip.insert(trip.end(), p.begin(), p.end());

  GalerkinSystem sys;
  sys.m = spec.m;
  const auto n = static_cast<Eigen::Index>(index.size());
  sys.A.resize(n, n);
  sys.A.setFromTriplets(trip.begin(), trip.end());
  sys.F = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < index.size(); ++i)
    if (index[i].s.is_zero()) sys.F[static_cast<Eigen::Index>(i)] = real_load(spec.f, index[i].k);
  sys.index = std::move(index);
  return sys;
}

inline std::vector<FieldKey> index_of(const HyperbolicCross& cross) {
  std::vector<FieldKey> out;
  out.reserve(cross.entries.size());
  for (const auto& e : cross.entries) out.push_back({e.k, e.s});
  return out;
}

enum class Preconditioner { Jacobi, None };

struct SolveOptions {
  double tol = 1e-12;
  int max_iterations = 20000;
  Preconditioner preconditioner = Preconditioner::Jacobi;
};

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Conjugate gradients from a zero start; fails with NonConvergence.
inline Eigen::VectorXd cg_solve(const SparseMatrix& A, const Eigen::VectorXd& F, const SolveOptions& opts,
                                SolveStats* stats = nullptr) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(F.size());
  if (F.size() == 0 || F.norm() == 0.0) return x;
  auto finish = [&](auto& cg) {
    cg.setTolerance(opts.tol);
    cg.setMaxIterations(opts.max_iterations);
    cg.compute(A);
    x = cg.solve(F);
    if (stats) *stats = {static_cast<int>(cg.iterations()), cg.error()};
    if (cg.info() != Eigen::Success)
      fail(ErrorKind::NonConvergence, "CG stopped after " + std::to_string(cg.iterations()) +
                                          " iterations at relative residual " + std::to_string(cg.error()));
  };
  if (opts.preconditioner == Preconditioner::Jacobi) {
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
    finish(cg);
  } else {
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::IdentityPreconditioner> cg;
    finish(cg);
  }
  return x;
}

/// Galerkin solution as coefficients on phi_k L_s.
inline CoefficientField solve(const GalerkinSystem& sys, const SolveOptions& opts = {}, SolveStats* stats = nullptr) {
  const Eigen::VectorXd x = cg_solve(sys.A, sys.F, opts, stats);
  CoefficientField u(sys.m);
  for (std::size_t i = 0; i < sys.index.size(); ++i) u.set(sys.index[i].k, sys.index[i].s, x[static_cast<Eigen::Index>(i)]);
  return u;
}

}  // namespace hypercross::pde
