#pragma once

// Small random m = 1 problems together with a quadrature oracle for the
// Galerkin matrix that only evaluates plain cos/sin sums.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "hypercross/pde/galerkin.hpp"
#include "oracles.hpp"

namespace oracle {

struct PlainMode {
  std::int64_t k;
  double c, s;
};
using Plain = std::vector<PlainMode>;

inline double eval(const Plain& f, double x) {
  double acc = 0.0;
  for (const auto& md : f) {
    const double ph = 2.0 * std::numbers::pi * static_cast<double>(md.k) * x;
    acc += md.c * std::cos(ph) + md.s * std::sin(ph);
  }
  return acc;
}

struct PlainProblem {
  Plain abar;
  std::vector<Plain> psi;
  Plain f;
};

struct PlainKey {
  std::int64_t k;
  Exps s;  // dense, length J
};

inline hypercross::pde::TrigFunction to_trig(const Plain& f) {
  hypercross::pde::TrigFunction out(1);
  for (const auto& md : f) out.add_mode({md.k}, md.c, md.s);
  return out;
}

inline hypercross::pde::ProblemSpec to_spec(const PlainProblem& p) {
  hypercross::pde::ProblemSpec spec;
  spec.m = 1;
  spec.abar = to_trig(p.abar);
  for (const auto& q : p.psi) spec.psi.push_back(to_trig(q));
  spec.f = to_trig(p.f);
  return spec;
}

inline hypercross::FieldKey to_key(const PlainKey& key) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
  for (std::size_t j = 0; j < key.s.size(); ++j)
    if (key.s[j]) pairs.emplace_back(j + 1, key.s[j]);
  return {{key.k}, hypercross::MultiIndex::from_pairs(pairs)};
}

/// Random problem with J <= 2, at most 8 modes in total, and an index set of
/// frequencies in +-1..4 and parameter degree <= 2.
inline std::pair<PlainProblem, std::vector<PlainKey>> random_problem(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> J_d(0, 2), kd(-3, 3), nmodes(1, 2), coin(0, 1);
  PlainProblem p;
  p.abar.push_back({0, 3.0, 0.0});
  p.abar.push_back({kd(rng), 0.3 * u(rng), 0.3 * u(rng)});
  const int J = J_d(rng);
  for (int j = 0; j < J; ++j) {
    Plain q;
    for (int i = 0, n = nmodes(rng); i < n; ++i) q.push_back({kd(rng), 0.3 * u(rng), 0.3 * u(rng)});
    p.psi.push_back(q);
  }
  p.f.push_back({1 + coin(rng), u(rng), u(rng)});
  std::vector<PlainKey> keys;
  for_each_s(static_cast<std::size_t>(J), 2, [&](const Exps& s) {
    for (std::int64_t k = -4; k <= 4; ++k)
      if (k != 0 && coin(rng)) keys.push_back({k, s});
  });
  if (keys.empty()) keys.push_back({1, Exps(static_cast<std::size_t>(J), 0)});
  return {p, keys};
}

/// A[a][b] = E_y int a(x,y) phi_ka' phi_kb' L_sa L_sb dx, F[a] = E_y int f phi_ka L_sa dx.
inline std::pair<std::vector<std::vector<double>>, std::vector<double>> quadrature_system(
    const PlainProblem& p, const std::vector<PlainKey>& keys) {
  const std::size_t J = p.psi.size(), n = keys.size();
  const auto rule = gauss(8);
  const unsigned gx = 48;
  std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
  std::vector<double> F(n, 0.0);
  std::vector<unsigned> yi(J, 0);
  while (true) {
    double wy = 1.0;
    std::vector<double> y(J);
    for (std::size_t j = 0; j < J; ++j) {
      y[j] = rule.first[yi[j]];
      wy *= 0.5 * rule.second[yi[j]];
    }
    std::vector<double> L(n, 1.0);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t j = 0; j < J; ++j) L[a] *= legendre(keys[a].s[j], y[j]);
    for (unsigned g = 0; g < gx; ++g) {
      const std::vector<double> x = {static_cast<double>(g) / gx};
      double coef = eval(p.abar, x[0]);
      for (std::size_t j = 0; j < J; ++j) coef += y[j] * eval(p.psi[j], x[0]);
      std::vector<double> grad(n), val(n);
      for (std::size_t a = 0; a < n; ++a) {
        grad[a] = phi_grad({keys[a].k}, x)[0];
        val[a] = phi({keys[a].k}, x);
      }
      const double w = wy / gx;
      const double fx = eval(p.f, x[0]);
      for (std::size_t a = 0; a < n; ++a) {
        F[a] += w * fx * val[a] * L[a];
        for (std::size_t b = 0; b < n; ++b) A[a][b] += w * coef * grad[a] * grad[b] * L[a] * L[b];
      }
    }
    std::size_t j = 0;
    while (j < J && ++yi[j] == rule.first.size()) yi[j++] = 0;
    if (j == J) break;
  }
  return {A, F};
}

}  // namespace oracle
