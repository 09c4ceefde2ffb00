#pragma once

// Convergence studies: spatial Fourier-Galerkin on G(T) = {|k|_inf <= T} and
// the parametric Galerkin method on the hyperbolic cross E_{1,b}(T).

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hypercross/cross.hpp"
#include "hypercross/error.hpp"
#include "hypercross/pde/galerkin.hpp"
#include "hypercross/pde/reference.hpp"
#include "hypercross/sequences.hpp"
#include "hypercross/summability.hpp"

namespace hypercross::pde {

struct StudyRow {
  double T = 0.0;
  std::int64_t n = 0;
  double error = 0.0;
  double bound = 0.0;
  std::optional<double> slope_so_far;
};

struct StudyResult {
  std::vector<StudyRow> rows;
  double constant = 0.0;  // C (spatial) or B (parametric)
  std::optional<double> slope;
  bool bounds_ok = false;
  double reference_norm = 0.0;
  std::uint32_t reference_points = 0;

  bool slope_in(double lo, double hi) const { return slope && *slope >= lo && *slope <= hi; }
};

/// Least-squares slope of log error against log n.
inline std::optional<double> fitted_slope(std::span<const StudyRow> rows) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t cnt = 0;
  for (const auto& r : rows) {
    if (!(r.error > 0.0) || r.n <= 0) continue;
    const double x = std::log(static_cast<double>(r.n)), y = std::log(r.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt < 2) return std::nullopt;
  const double c = static_cast<double>(cnt);
  const double den = c * sxx - sx * sx;
  if (den <= 0.0) return std::nullopt;
  return (c * sxy - sx * sy) / den;
}

inline void finish_rows(StudyResult& res) {
  res.bounds_ok = true;
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    res.rows[i].slope_so_far = fitted_slope(std::span<const StudyRow>(res.rows.data(), i + 1));
    res.bounds_ok = res.bounds_ok && res.rows[i].error <= res.rows[i].bound;
  }
  res.slope = fitted_slope(res.rows);
}

struct StudyOptions {
  ReferenceOptions reference{};
  SolveOptions solver{};
  std::uint64_t materialize_cap = 2'000'000;
  SkeletonOptions skeleton{};
};

/// 2 sqrt(pi) sqrt(mR/r) (1/r)(1 + |a|_W/r) ||f||_{L_2}
inline double spatial_constant(const ProblemSpec& spec, const Ellipticity& ell) {
  const double m = static_cast<double>(spec.m);
  return 2.0 * std::sqrt(std::numbers::pi) * std::sqrt(m * ell.R / ell.r) / ell.r *
         (1.0 + coefficient_w_seminorm(spec) / ell.r) * spec.f.l2_norm();
}

inline StudyResult spatial_study(const ProblemSpec& spec, std::span<const double> Ts, const StudyOptions& opts = {}) {
  require(spec.psi.empty(), "the spatial study needs a deterministic problem (no psi_j)");
  const Ellipticity ell = ellipticity(spec);
  StudyResult res;
  res.constant = spatial_constant(spec, ell);
  ReferenceOptions ropts = opts.reference;
  for (double T : Ts) {
    require(T >= 1.0, "T must be >= 1");
    ropts.spatial_modes = std::max<std::int64_t>(ropts.spatial_modes, static_cast<std::int64_t>(std::floor(T)));
  }
  if (opts.reference.spatial_modes == 0)
    ropts.spatial_modes = std::max(ropts.spatial_modes, default_spatial_modes(spec));
  const ReferenceSolution ref = reference_solution(spec, ropts);
  res.reference_norm = ref.norm_V;
  const double m = static_cast<double>(spec.m);
  for (double T : Ts) {
    const auto K = static_cast<std::int64_t>(std::floor(T));
    std::vector<FieldKey> index;
    for (auto& k : torus_index(spec.m, K)) index.push_back({std::move(k), MultiIndex{}});
    const CoefficientField u = solve(assemble(spec, index), opts.solver);
    StudyRow row;
    row.T = T;
    row.n = static_cast<std::int64_t>(index.size());
    row.error = error_V(u, ref);
    row.bound = res.constant * std::pow(static_cast<double>(row.n), -1.0 / m);
    res.rows.push_back(row);
  }
  finish_rows(res);
  return res;
}

inline double study_c(std::uint64_t j) { return 1.0 + std::pow(static_cast<double>(j), -1.1); }

/// ||c^{-1}||_{l_2(F_J)} = prod_{j <= J} (1 - c_j^{-2})^{-1/2}
inline double inverse_c_norm(std::size_t J) {
  double out = 1.0;
  for (std::size_t j = 1; j <= J; ++j) {
    const double c = study_c(j);
    out /= std::sqrt(1.0 - 1.0 / (c * c));
  }
  return out;
}

struct ParametricConstants {
  Ellipticity ell;
  DecaySequences decay;  // W-version
  WeightSequence b = WeightSequence::finite({});
  Interval constC;       // (3/2)^{2m} sum_s w(s)^m
  double c_norm = 0.0;
  double B = 0.0;
};

/// b_j = c_j d_j with c_j = 1 + j^{-1.1} and the rate constant
///   B = 4 pi C^{1/m} sqrt(mR/r) K ||c^{-1}||.
inline ParametricConstants parametric_constants(const ProblemSpec& spec, double sum_tol = 1e-9) {
  ParametricConstants pc;
  pc.ell = ellipticity(spec);
  pc.decay = decay_W(spec, pc.ell);
  require(!pc.decay.d.empty(), "the parametric study needs at least one psi_j");
  std::vector<double> head;
  for (std::size_t j = 0; j < pc.decay.d.size(); ++j) {
    require(pc.decay.d[j] > 0.0, "every psi_j must be nonzero");
    head.push_back(study_c(j + 1) * pc.decay.d[j]);
  }
  pc.b = WeightSequence::finite(std::move(head));
  const Interval l1 = ell1_norm(pc.b);
  if (!(l1.hi < 1.0))
    fail(ErrorKind::HypothesisViolated,
         "||b||_1 = " + std::to_string(l1.hi) + " with b_j = c_j d_j is not below 1; scale the psi_j down");
  const double m = static_cast<double>(spec.m);
  const Interval S = sum_powers(m, pc.b, sum_tol);
  pc.constC = S;
  for (std::uint32_t i = 0; i < spec.m; ++i) pc.constC = mul_nonneg(pc.constC, Interval::exact(2.25));
  pc.c_norm = inverse_c_norm(spec.J());
  pc.B = 4.0 * std::numbers::pi * std::pow(pc.constC.hi, 1.0 / m) * std::sqrt(m * pc.ell.R / pc.ell.r) *
         pc.decay.K * pc.c_norm;
  return pc;
}

inline StudyResult convergence_study(const ProblemSpec& spec, std::span<const double> Ts,
                                     const StudyOptions& opts = {}, ParametricConstants* constants = nullptr) {
  const ParametricConstants pc = parametric_constants(spec);
  if (constants) *constants = pc;
  StudyResult res;
  res.constant = pc.B;
  std::vector<std::vector<FieldKey>> indices;
  std::int64_t kmax = 0;
  std::uint64_t degmax = 0;
  for (double T : Ts) {
    const CrossParams params{1.0, spec.m, pc.b, T};
    const HyperbolicCross E = materialize(params, opts.materialize_cap, opts.skeleton);
    if (E.truncated) fail(ErrorKind::CapExceeded, "hyperbolic cross enumeration was truncated");
    indices.push_back(index_of(E));
    for (const auto& key : indices.back()) {
      kmax = std::max<std::int64_t>(kmax, static_cast<std::int64_t>(kinf_norm(key.k)));
      for (const auto& e : key.s.entries()) degmax = std::max<std::uint64_t>(degmax, e.exp);
    }
  }
  ReferenceOptions ropts = opts.reference;
  if (ropts.spatial_modes == 0) ropts.spatial_modes = default_spatial_modes(spec);
  ropts.spatial_modes = std::max(ropts.spatial_modes, kmax);
  ropts.min_points = std::max<std::uint32_t>(ropts.min_points, static_cast<std::uint32_t>(degmax + 2));
  ropts.max_points = std::max(ropts.max_points, ropts.min_points);
  const ReferenceSolution ref = reference_solution(spec, ropts);
  res.reference_norm = ref.norm_V;
  res.reference_points = ref.points_per_dim;
  const double m = static_cast<double>(spec.m);
  for (std::size_t t = 0; t < Ts.size(); ++t) {
    const CoefficientField u = solve(assemble(spec, indices[t]), opts.solver);
    StudyRow row;
    row.T = Ts[t];
    row.n = static_cast<std::int64_t>(indices[t].size());
    row.error = error_V(u, ref);
    row.bound = pc.B * std::pow(static_cast<double>(row.n), -1.0 / m);
    res.rows.push_back(row);
  }
  finish_rows(res);
  return res;
}

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// CSV with header T,n,error_V,bound,slope_so_far (empty slope on the first row).
inline std::string to_csv(const StudyResult& res) {
  std::string out = "T,n,error_V,bound,slope_so_far\n";
  for (const auto& r : res.rows) {
    out += format_double(r.T) + "," + std::to_string(r.n) + "," + format_double(r.error) + "," +
           format_double(r.bound) + "," + (r.slope_so_far ? format_double(*r.slope_so_far) : "") + "\n";
  }
  return out;
}

}  // namespace hypercross::pde
