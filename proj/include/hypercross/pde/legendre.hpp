#pragma once

// Legendre polynomials orthonormal for the uniform probability measure dy/2 on
// [-1, 1]: L_n = sqrt(2n+1) P_n. Multiplication by y is three-term:
//   y L_n = c_upper(n) L_{n+1} + c_lower(n) L_{n-1}.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "hypercross/error.hpp"
#include "hypercross/multiindex.hpp"

namespace hypercross::pde {

struct Coupling {
  double lower = 0.0;
  double upper = 0.0;
};

inline double legendre_upper(std::uint64_t n) {
  const double x = static_cast<double>(n);
  return (x + 1.0) / std::sqrt((2.0 * x + 1.0) * (2.0 * x + 3.0));
}

inline Coupling legendre_coupling(std::uint64_t n) {
  return {n == 0 ? 0.0 : legendre_upper(n - 1), legendre_upper(n)};
}

/// L_0(y), ..., L_nmax(y).
inline std::vector<double> legendre_values(double y, std::uint64_t nmax) {
  std::vector<double> out(nmax + 1);
  out[0] = 1.0;
  if (nmax >= 1) out[1] = std::sqrt(3.0) * y;
  for (std::uint64_t n = 1; n < nmax; ++n) {
    const Coupling c = legendre_coupling(n);
    out[n + 1] = (y * out[n] - c.lower * out[n - 1]) / c.upper;
  }
  return out;
}

/// L_s(y) = prod_j L_{s_j}(y_j) with per-dimension value tables.
inline double legendre_product(const MultiIndex& s, std::span<const std::vector<double>> tables) {
  double out = 1.0;
  for (const auto& e : s.entries()) out *= tables[e.dim - 1][e.exp];
  return out;
}

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;  // sum to 1 (probability measure dy/2)
};

/// n-point Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
inline GaussRule gauss_legendre(std::uint32_t n) {
  require(n >= 1, "Gauss rule needs at least one node");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::uint32_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::uint32_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 1.0 / ((1.0 - x * x) * dp * dp);  // 2 / (...) halved for dy/2
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace hypercross::pde
