#include "frictio/incremental.hpp"
#include "frictio/oracle.hpp"
#include "frictio/residuals.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace frictio;

namespace {

const StiffnessMatrix2 K212(2.0, 1.0, 2.0);

void expect_vec(const Vec2& a, const Vec2& b, double tol) {
  EXPECT_NEAR(a(0), b(0), tol);
  EXPECT_NEAR(a(1), b(1), tol);
}

}  // namespace

TEST(Tresca, Examples) {
  auto s = tresca_minimize({K212, Vec2(0, 0), 0.0, 0.0});
  expect_vec(s.u, Vec2(0, 0), 1e-15);
  expect_vec(s.t, Vec2(0, 0), 1e-15);

  s = tresca_minimize({K212, Vec2(1, 3), 0.0, 0.0});
  expect_vec(s.u, Vec2(-1.0 / 3.0, 5.0 / 3.0), 1e-14);
  expect_vec(s.t, Vec2(0, 0), 1e-14);

  s = tresca_minimize({K212, Vec2(-1, 0), 1.0, 2.0});
  expect_vec(s.u, Vec2(-1, 1), 1e-14);
  expect_vec(s.t, Vec2(0, 1), 1e-14);
}

TEST(Tresca, InfiniteBoundSticks) {
  const auto s = tresca_minimize({K212, Vec2(1, 3), 0.25, std::numeric_limits<double>::infinity()});
  EXPECT_DOUBLE_EQ(s.u_t(), 0.25);
  EXPECT_LE(s.u_n(), 0.0);
}

TEST(Tresca, MatchesOracleOnExample) {
  oracle::ConvexObjective obj{K212.matrix(), Vec2(1, 3), {{1, 0.0, 0.0}}};
  oracle::GridSpec grid;
  grid.center = Vec2(0, 0);
  grid.half_width = Vec2(4, 4);
  const auto res = oracle::brute_minimize(obj, Vec2(0.0, std::numeric_limits<double>::infinity()), grid);
  expect_vec(res.x, Vec2(-1.0 / 3.0, 5.0 / 3.0), 1e-6);
}

TEST(Tresca, ObjectiveIsMinimal) {
  testkit::Rng rng(5);
  for (int k = 0; k < 200; ++k) {
    const auto K = testkit::random_stiffness(rng, false);
    const TrescaProblem p{K, testkit::random_vec(rng, 2.0), testkit::uniform(rng, -1, 1), testkit::uniform(rng, 0, 2)};
    const auto s = tresca_minimize(p);
    const double best = tresca_objective(p, s.u);
    for (int j = 0; j < 20; ++j) {
      Vec2 v = s.u + testkit::random_vec(rng, 0.1);
      v(0) = std::min(v(0), 0.0);
      EXPECT_GE(tresca_objective(p, v), best - 1e-12);
    }
  }
}

TEST(SigmaBound, Examples) {
  EXPECT_DOUBLE_EQ(sigma_upper_bound(K212, Vec2(-1, 0), 1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(sigma_upper_bound(K212, Vec2(0, 0), 0.0, 3.0), 0.0);
  EXPECT_DOUBLE_EQ(sigma_upper_bound(K212, Vec2(3, 0), 0.0, 2.0), 6.0);
}

TEST(PressureMap, Examples) {
  EXPECT_DOUBLE_EQ(pressure_map({K212, Vec2(-1, 0), 0.0, 0.0}, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(pressure_map({K212, Vec2(2, 0), 0.0, 0.0}, 1.0), 2.0);
  const TrescaProblem fixed{K212, Vec2(2, 0), 0.0, 2.0};
  EXPECT_DOUBLE_EQ(pressure_map(fixed, 1.0), 2.0);
  expect_vec(tresca_minimize(fixed).t, Vec2(-2, 0), 1e-15);
}

TEST(SolveIncremental, Examples) {
  auto sol = solve_incremental(K212, Vec2(0, 0), 0.0, 0.5);
  expect_vec(sol.state.u, Vec2(0, 0), 1e-15);
  EXPECT_TRUE(sol.unique);

  sol = solve_incremental(K212, Vec2(2, 0), 0.0, 1.0);
  expect_vec(sol.state.u, Vec2(0, 0), 1e-12);
  expect_vec(sol.state.t, Vec2(-2, 0), 1e-12);
  EXPECT_EQ(sol.regime, Regime::Stick);
  EXPECT_TRUE(sol.unique);

  sol = solve_incremental(K212, Vec2(1.5, 3), 0.0, 2.0);
  EXPECT_FALSE(sol.unique);
  EXPECT_TRUE(check_incremental_kkt(K212, Vec2(1.5, 3), 0.0, 2.0, sol.state, 1e-10).pass);
  EXPECT_EQ(sol.state.u_n(), 0.0);
  EXPECT_GE(sol.state.u_t(), 0.0);
}

TEST(SolveIncremental, RandomInstancesSatisfyKkt) {
  testkit::Rng rng(11);
  for (int k = 0; k < 500; ++k) {
    const auto K = testkit::random_stiffness(rng, false);
    const Vec2 F = testkit::random_vec(rng, 3.0);
    const double w = testkit::uniform(rng, -1, 1);
    const double f = testkit::uniform(rng, 0.0, 4.0);
    const auto sol = solve_incremental(K, F, w, f);
    EXPECT_TRUE(check_incremental_kkt(K, F, w, f, sol.state, 1e-10).pass) << k;
  }
}

TEST(SolveIncremental, SelectionRules) {
  // two solutions: stuck at the origin and slipping at u_t = 0.5
  const Vec2 F(0.5, 1.0);
  const auto set = incremental_solution_set(K212, F, 0.0, 2.0);
  ASSERT_FALSE(set.empty());
  const auto lo = solve_incremental(K212, F, 0.0, 2.0, Selection::smallest());
  const auto hi = solve_incremental(K212, F, 0.0, 2.0, Selection::largest());
  EXPECT_LE(-lo.state.t_n(), -hi.state.t_n() + 1e-12);
  const auto near = solve_incremental(K212, F, 0.0, 2.0, Selection::nearest(Vec2(0, 0)));
  EXPECT_TRUE(check_incremental_kkt(K212, F, 0.0, 2.0, near.state, 1e-10).pass);
  EXPECT_LE(near.state.u.norm(), lo.state.u.norm() + 1e-12);
}

TEST(SolutionSet, CriticalSegment) {
  const auto set = incremental_solution_set(K212, Vec2(1.5, 3), 0.0, 2.0);
  ASSERT_TRUE(set.segment.has_value());
  const auto mid = set.nearest(Vec2(0.0, 0.75));
  EXPECT_NEAR(mid.u_t(), 0.75, 1e-12);
}

TEST(Classify, Regimes) {
  EXPECT_EQ(classify({Vec2(-1, 0), Vec2(0, 0)}, 0.0, 1e-12), Regime::Separated);
  EXPECT_EQ(classify({Vec2(0, 0), Vec2(-1, 0)}, 0.0, 1e-12), Regime::Stick);
  EXPECT_EQ(classify({Vec2(0, 1), Vec2(-1, -1)}, 0.0, 1e-12), Regime::SlipPositive);
  EXPECT_EQ(classify({Vec2(0, -1), Vec2(-1, 1)}, 0.0, 1e-12), Regime::SlipNegative);
}

TEST(ContinuumFamily, Examples) {
  const auto fam = continuum_family(K212, 2.0, 3.0);
  expect_vec(fam.F, Vec2(1.5, 3.0), 1e-15);
  EXPECT_DOUBLE_EQ(fam.t_n_min, -1.5);
  EXPECT_DOUBLE_EQ(fam.t_n_max, 0.0);
  expect_vec(fam.state(-1.5).u, Vec2(0, 0), 1e-15);
  expect_vec(fam.state(0.0).u, Vec2(0, 1.5), 1e-15);
  const auto mid = fam.state(-0.75);
  expect_vec(mid.u, Vec2(0, 0.75), 1e-15);
  expect_vec(mid.t, Vec2(-0.75, -1.5), 1e-15);
  EXPECT_TRUE(check_incremental_kkt(K212, fam.F, 0.0, 2.0, mid, 1e-10).pass);
}

TEST(ContinuumFamily, Errors) {
  try {
    continuum_family(K212, 2.0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveLoad);
  }
  try {
    continuum_family(K212, 1.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotCritical);
  }
}

TEST(LipschitzProbe, DiagonalStiffness) {
  const StiffnessMatrix2 K(2.0, 0.0, 4.0);
  const double f = 0.7;
  // with k_nt = 0 the solution map is (F_n, F_t) -> (min(F_n, 0) / k_nn, slip or stick in t),
  // whose Lipschitz constant is the norm of [[1/k_nn, 0], [-f/k_tt, 1/k_tt]]
  Mat2 J;
  J << 1.0 / 2.0, 0.0, -f / 4.0, 1.0 / 4.0;
  const double bound = J.jacobiSvd().singularValues()(0);
  const double c = lipschitz_probe(K, f, 2000, 1);
  EXPECT_LE(c, bound + 1e-9);
  EXPECT_GT(c, 0.5 * bound);
}

TEST(LipschitzProbe, StableAcrossSeeds) {
  const double a = lipschitz_probe(K212, 1.0, 10000, 1);
  const double b = lipschitz_probe(K212, 1.0, 10000, 2);
  EXPECT_TRUE(std::isfinite(a));
  EXPECT_NEAR(a / b, 1.0, 0.1);
  try {
    lipschitz_probe(K212, 2.5, 10, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SupercriticalFriction);
  }
}
