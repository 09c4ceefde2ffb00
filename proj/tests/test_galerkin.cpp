#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hypercross/pde/galerkin.hpp"
#include "random_specs.hpp"

using namespace hypercross;
using namespace hypercross::pde;

namespace {

ProblemSpec poisson() {
  ProblemSpec spec;
  spec.abar = TrigFunction::constant(1, 1.0);
  spec.f = TrigFunction(1);
  spec.f.add_mode({1}, 1.0, 0.0);
  spec.f.add_mode({2}, 0.0, 0.5);
  return spec;
}

ProblemSpec one_param(double amp) {
  ProblemSpec spec = poisson();
  TrigFunction p(1);
  p.add_mode({2}, amp, 0.0);
  spec.psi.push_back(p);
  return spec;
}

}  // namespace

TEST(Galerkin, TorusIndex) {
  const auto idx = torus_index(2, 2);
  EXPECT_EQ(idx.size(), 16u);
  EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
  for (const auto& k : idx)
    for (auto c : k) EXPECT_NE(c, 0);
  EXPECT_EQ(torus_index(3, 1).size(), 8u);
}

TEST(Galerkin, AssemblyMatchesQuadrature) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const auto [plain, keys] = oracle::random_problem(rng);
    std::vector<FieldKey> index;
    for (const auto& k : keys) index.push_back(oracle::to_key(k));
    const auto sys = assemble(oracle::to_spec(plain), index);
    const auto [A, F] = oracle::quadrature_system(plain, keys);
    const Eigen::MatrixXd dense(sys.A);
    for (std::size_t a = 0; a < keys.size(); ++a) {
      EXPECT_NEAR(sys.F[static_cast<Eigen::Index>(a)], F[a], 1e-10);
      for (std::size_t b = 0; b < keys.size(); ++b)
        EXPECT_NEAR(dense(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)), A[a][b], 1e-8 * (1.0 + std::abs(A[a][b])))
            << "trial " << trial;
    }
  }
}

TEST(Galerkin, ExactSymmetry) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto [plain, keys] = oracle::random_problem(rng);
    std::vector<FieldKey> index;
    for (const auto& k : keys) index.push_back(oracle::to_key(k));
    const Eigen::MatrixXd dense(assemble(oracle::to_spec(plain), index).A);
    EXPECT_EQ((dense - dense.transpose()).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Galerkin, TwoByTwoExample) {
  const auto spec = one_param(0.5);
  const auto sys = assemble(spec, {{{1}, MultiIndex{}}, {{1}, MultiIndex::unit(1)}});
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const Eigen::MatrixXd A(sys.A);
  EXPECT_NEAR(A(0, 0), 4 * pi2, 1e-12);
  EXPECT_NEAR(A(1, 1), 4 * pi2, 1e-12);
  EXPECT_NEAR(A(0, 1), -pi2 / std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(A(1, 0), -pi2 / std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(sys.F[0], std::sqrt(0.5), 1e-15);
  EXPECT_EQ(sys.F[1], 0.0);
}

TEST(Galerkin, NoPsiIsBlockDiagonal) {
  ProblemSpec spec = poisson();
  spec.psi.push_back(TrigFunction(1));  // J = 1 but psi_1 = 0
  std::vector<FieldKey> index;
  for (std::int64_t k : {-2, -1, 1, 2})
    for (std::uint64_t e : {0u, 1u, 2u}) index.push_back({{k}, e ? MultiIndex::unit(1, e) : MultiIndex{}});
  const Eigen::MatrixXd A(assemble(spec, index).A);
  for (Eigen::Index a = 0; a < A.rows(); ++a)
    for (Eigen::Index b = 0; b < A.cols(); ++b)
      if (index[a].s != index[b].s) EXPECT_EQ(A(a, b), 0.0);
}

TEST(Galerkin, PoissonClosedForm) {
  const auto spec = poisson();
  std::vector<FieldKey> index;
  for (auto& k : torus_index(1, 4)) index.push_back({k, MultiIndex{}});
  const auto u = solve(assemble(spec, index));
  const double tp2 = 4 * std::numbers::pi * std::numbers::pi;
  EXPECT_NEAR(u.get({1}, MultiIndex{}), std::sqrt(0.5) / tp2, 1e-14);
  EXPECT_NEAR(u.get({-2}, MultiIndex{}), 0.5 * std::sqrt(0.5) / (4 * tp2), 1e-14);
  EXPECT_NEAR(u.get({3}, MultiIndex{}), 0.0, 1e-16);
}

TEST(Galerkin, SolveResidual) {
  const auto spec = one_param(0.4);
  std::vector<FieldKey> index;
  for (auto& k : torus_index(1, 6))
    for (std::uint64_t e = 0; e < 5; ++e) index.push_back({k, e ? MultiIndex::unit(1, e) : MultiIndex{}});
  const auto sys = assemble(spec, index);
  SolveStats stats;
  const auto x = cg_solve(sys.A, sys.F, {}, &stats);
  EXPECT_LE((sys.A * x - sys.F).norm(), 1e-10 * sys.F.norm());
  EXPECT_GT(stats.iterations, 0);
  SolveOptions bad;
  bad.max_iterations = 1;
  bad.preconditioner = Preconditioner::None;
  try {
    cg_solve(sys.A, sys.F, bad);
    FAIL() << "expected NonConvergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonConvergence);
  }
}

TEST(Galerkin, DimensionOutOfRange) {
  const auto spec = one_param(0.3);
  try {
    assemble(spec, {{{1}, MultiIndex::unit(2)}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionOutOfRange);
  }
}

TEST(Ellipticity, Certified) {
  auto spec = one_param(0.3);
  const auto ell = ellipticity(spec);
  EXPECT_LE(ell.r, 0.7);
  EXPECT_GT(ell.r, 0.69);
  EXPECT_GE(ell.R, 1.3);
  EXPECT_LT(ell.R, 1.31);
  spec.r = 0.5;
  spec.R = 2.0;
  const auto stated = ellipticity(spec);
  EXPECT_EQ(stated.r, 0.5);
  EXPECT_EQ(stated.R, 2.0);
}

TEST(Ellipticity, Violations) {
  auto expect_not_elliptic = [](const ProblemSpec& spec) {
    try {
      ellipticity(spec);
      ADD_FAILURE() << "expected NotElliptic";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::NotElliptic);
    }
  };
  expect_not_elliptic(one_param(1.2));
  auto a = one_param(0.3);
  a.r = 0.9;
  expect_not_elliptic(a);
  auto b = one_param(0.3);
  b.R = 1.0;
  expect_not_elliptic(b);
}
