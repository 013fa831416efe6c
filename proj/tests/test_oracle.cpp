#include "frictio/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace frictio;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

oracle::GridSpec grid2(double half) {
  oracle::GridSpec g;
  g.center = Eigen::Vector2d(0, 0);
  g.half_width = Eigen::Vector2d(half, half);
  return g;
}

}  // namespace

TEST(BruteMinimize, IdentityQuadratic) {
  oracle::ConvexObjective obj{Eigen::Matrix2d::Identity(), Eigen::Vector2d(0, 0), {}};
  const auto res = oracle::brute_minimize(obj, Eigen::Vector2d(kInf, kInf), grid2(1.3));
  EXPECT_LE(res.x.norm(), 1e-8);
  EXPECT_GT(res.evaluations, 0);
}

TEST(BruteMinimize, TrescaExample) {
  Eigen::Matrix2d K;
  K << 2, 1, 1, 2;
  oracle::ConvexObjective obj{K, Eigen::Vector2d(1, 3), {{1, 0.0, 0.0}}};
  const auto res = oracle::brute_minimize(obj, Eigen::Vector2d(0.0, kInf), grid2(4.0));
  EXPECT_NEAR(res.x(0), -1.0 / 3.0, 1e-6);
  EXPECT_NEAR(res.x(1), 5.0 / 3.0, 1e-6);
}

TEST(BruteMinimize, ScalarContact) {
  oracle::ConvexObjective obj{Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::VectorXd::Constant(1, 1.0), {}};
  oracle::GridSpec g;
  g.center = Eigen::VectorXd::Zero(1);
  g.half_width = Eigen::VectorXd::Constant(1, 2.0);
  const auto res = oracle::brute_minimize(obj, Eigen::VectorXd::Zero(1), g);
  EXPECT_NEAR(res.x(0), 0.0, 1e-12);
  EXPECT_EQ(oracle::scalar_contact_minimizer(2.0, 1.0), 0.0);
  EXPECT_EQ(oracle::scalar_contact_minimizer(2.0, -1.0), -0.5);
}

TEST(BruteMinimize, Errors) {
  oracle::ConvexObjective obj{Eigen::Matrix2d::Identity(), Eigen::Vector2d(0, 0), {}};
  auto g = grid2(1.0);
  g.points = 40;
  EXPECT_THROW(oracle::brute_minimize(obj, Eigen::Vector2d(kInf, kInf), g), Error);
  try {
    oracle::brute_minimize(obj, Eigen::Vector2d(-5.0, kInf), grid2(1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasibleGrid);
  }
}

TEST(ScalarTresca, ClosedForm) {
  EXPECT_EQ(oracle::scalar_tresca(2.0, 1.0, 0.0, 2.0), 0.0);
  EXPECT_DOUBLE_EQ(oracle::scalar_tresca(2.0, 3.0, 0.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(oracle::scalar_tresca(2.0, -3.0, 0.0, 1.0), -1.0);
}

TEST(QuadratureEnergy, ZeroDisplacement) {
  EXPECT_EQ(oracle::quadrature_energy(Point(-1, 0), Point(0, 0), Point(1, -1), ElasticMaterial(1.0, 0.0),
                                      Vec2(0, 0)),
            0.0);
}

TEST(ProjectedGradientQp, BoxActive) {
  Eigen::Matrix2d K;
  K << 2, 1, 1, 2;
  const auto x = oracle::projected_gradient_qp(K, Eigen::Vector2d(3, 0), Eigen::Vector2d(0.0, kInf));
  // u_n clamped at 0, u_t = 0 from the second row
  EXPECT_NEAR(x(0), 0.0, 1e-12);
  EXPECT_NEAR(x(1), 0.0, 1e-12);
  const auto y = oracle::projected_gradient_qp(K, Eigen::Vector2d(1, 3), Eigen::Vector2d(0.0, kInf));
  EXPECT_NEAR(y(0), -1.0 / 3.0, 1e-12);
  EXPECT_NEAR(y(1), 5.0 / 3.0, 1e-12);
}
