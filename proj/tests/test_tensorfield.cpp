#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hypercross/tensorfield.hpp"
#include "hypercross/weights.hpp"

using namespace hypercross;

namespace {

CoefficientField random_field(std::mt19937_64& rng, std::uint32_t m, std::size_t n, std::size_t J) {
  CoefficientField v(m);
  std::uniform_int_distribution<int> kd(1, 12), sd(0, 3), sign(0, 1);
  std::normal_distribution<double> val(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::int64_t> k(m);
    for (auto& c : k) c = kd(rng) * (sign(rng) ? 1 : -1);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
    for (std::size_t j = 1; j <= J; ++j) pairs.emplace_back(j, sd(rng));
    v.set(k, MultiIndex::from_pairs(pairs), val(rng));
  }
  return v;
}

}  // namespace

TEST(CoefficientField, Basics) {
  CoefficientField v(2);
  v.set({1, -2}, MultiIndex{}, 3.0);
  EXPECT_EQ(v.get({1, -2}, MultiIndex{}), 3.0);
  EXPECT_EQ(v.size(), 1u);
  v.set({1, -2}, MultiIndex{}, 0.0);
  EXPECT_TRUE(v.empty());
  EXPECT_THROW(v.set({0, 1}, MultiIndex{}, 1.0), Error);
  EXPECT_THROW(v.set({1}, MultiIndex{}, 1.0), Error);
}

TEST(Norms, Examples) {
  const auto b = WeightSequence::finite({0.5});
  CoefficientField v(1);
  v.set({1}, MultiIndex{}, 1.0);
  EXPECT_DOUBLE_EQ(norm_A(v, 1.0, b), 1.0);
  CoefficientField w(1);
  w.set({2}, MultiIndex::unit(1), 1.0);
  EXPECT_NEAR(norm_A(w, 1.0, b), 4.0, 1e-14);
  EXPECT_EQ(norm_A(CoefficientField(1), 1.0, b), 0.0);

  CoefficientField z(1);
  z.set({3}, MultiIndex::unit(4, 2), 1.0);
  EXPECT_NEAR(norm_K(z, 2.0), 9.0, 1e-13);
  CoefficientField two(1);
  two.set({2}, MultiIndex{}, 3.0);
  two.set({-5}, MultiIndex::unit(1), 0.5);
  EXPECT_NEAR(norm_K(two, 1.0), std::sqrt(36.0 + 6.25), 1e-13);
  EXPECT_EQ(norm_K(two, 0.0), norm_L2(two));
}

TEST(ProjectST, Examples) {
  const auto b = WeightSequence::finite({0.5});
  CoefficientField v(1);
  v.set({4}, MultiIndex{}, 1.0);
  v.set({-1}, MultiIndex::unit(1, 2), 2.0);  // ratio 1 * 4 = 4
  EXPECT_EQ(project_ST(v, 1e6, 2.0, 1.0, b), v);
  EXPECT_TRUE(project_ST(v, 3.9, 2.0, 1.0, b).empty());
  EXPECT_EQ(project_ST(v, 4.0, 2.0, 1.0, b).size(), 2u);
  CoefficientField single(1);
  single.set({4}, MultiIndex{}, 1.0);
  EXPECT_EQ(project_ST(single, 3.99, 1.5, 0.5, b).size(), 0u);
  EXPECT_EQ(project_ST(single, 4.0, 1.5, 0.5, b).size(), 1u);
}

TEST(ProjectST, PythagorasAndIdempotence) {
  std::mt19937_64 rng(11);
  const auto b = WeightSequence::power({0.4, 0.3}, 0.2, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto v = random_field(rng, 2, 50, 3);
    const double T = 1.0 + 20.0 * std::generate_canonical<double, 53>(rng);
    const auto p = project_ST(v, T, 2.0, 1.0, b);
    const double a = norm_L2(v), c = norm_L2(p), d = norm_L2(difference(v, p));
    EXPECT_NEAR(a * a, c * c + d * d, 1e-10 * a * a);
    EXPECT_EQ(project_ST(p, T, 2.0, 1.0, b), p);
  }
}

TEST(ProjectionLemma, RandomFields) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double beta = 2.0 * u(rng);
    const double alpha = beta + 0.1 + 2.0 * u(rng);
    const auto b = WeightSequence::power({0.1 + 0.4 * u(rng)}, 0.05 + 0.3 * u(rng), 1.5 + u(rng));
    const double T = 1.0 + 50.0 * u(rng);
    const auto v = random_field(rng, 1 + trial % 3, 50, 2);
    const auto rep = check_projection_lemma(v, T, alpha, beta, b);
    EXPECT_TRUE(rep.ok) << rep.lhs << " > " << rep.rhs;
  }
}

TEST(ProjectionLemma, InsideIsZero) {
  const auto b = WeightSequence::finite({0.5});
  CoefficientField v(1);
  v.set({2}, MultiIndex{}, 1.0);
  const auto rep = check_projection_lemma(v, 2.0, 2.0, 1.0, b);
  EXPECT_EQ(rep.lhs, 0.0);
  EXPECT_TRUE(rep.ok);
}

TEST(ProjectionLemma, SharpnessWitness) {
  for (double T : {2.0, 10.0}) {
    // rho = 1 / b_1 sits just above T, so the entry is cut and lhs/rhs = 0.999
    const auto b = WeightSequence::finite({0.999 / T});
    CoefficientField v(1);
    v.set({1}, MultiIndex::unit(1), 1.0);
    const auto rep = check_projection_lemma(v, T, 2.0, 1.0, b);
    EXPECT_TRUE(rep.ok);
    EXPECT_GE(rep.lhs, 0.99 * rep.rhs);
  }
}
