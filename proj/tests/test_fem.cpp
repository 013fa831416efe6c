#include "frictio/fem.hpp"
#include "frictio/incremental.hpp"
#include "frictio/oracle.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace frictio;

namespace {

const Point A(-1.0, 0.0), B(0.0, 0.0), C(1.0, -1.0);

VecX load4(double bx, double by, double tx, double ty) {
  VecX v(4);
  v << bx, by, tx, ty;
  return v;
}

// two triangles sharing the edge (0,0)-(1,-1); node 3 is the contact node
PlaneMesh strip() {
  PlaneMesh m;
  m.nodes = {Point(0, 0), Point(1, -1), Point(0, -1), Point(1, 0)};
  m.triangles = {{0, 2, 1}, {0, 1, 3}};
  m.gamma_u = {2};
  m.gamma_t_edges = {{0, 3}};
  m.gamma_c = {{3, 0.0, Vec2(0.0, 1.0)}};
  // node 0 clamped as well, so the body is fixed
  m.gamma_u.push_back(0);
  return m;
}

}  // namespace

TEST(Triangle, CondensedStiffnessExamples) {
  const ElasticMaterial unit(1.0, 0.0);
  const auto K1 = triangle_condensed_stiffness(A, B, Point(0, -1), unit);
  EXPECT_NEAR(K1.k_nn(), 0.25, 1e-15);
  EXPECT_NEAR(K1.k_nt(), 0.0, 1e-15);
  EXPECT_NEAR(K1.k_tt(), 0.5, 1e-15);
  const auto K2 = triangle_condensed_stiffness(A, B, C, unit);
  EXPECT_NEAR(K2.k_nn(), 0.75, 1e-15);
  EXPECT_NEAR(K2.k_nt(), 0.25, 1e-15);
  EXPECT_NEAR(K2.k_tt(), 0.75, 1e-15);
}

TEST(Triangle, QuadratureOracleAgrees) {
  const ElasticMaterial mat(2.5, 0.3);
  const auto K = triangle_condensed_stiffness(A, B, C, mat);
  // energy of unit tangential (x) and normal (y) displacements of A
  EXPECT_NEAR(oracle::quadrature_energy(A, B, C, mat, Vec2(1, 0)), 0.5 * K.k_tt(), 1e-14);
  EXPECT_NEAR(oracle::quadrature_energy(A, B, C, mat, Vec2(0, 1)), 0.5 * K.k_nn(), 1e-14);
  const double e11 = oracle::quadrature_energy(A, B, C, mat, Vec2(1, 1));
  EXPECT_NEAR(e11, 0.5 * (K.k_nn() + K.k_tt()) + K.original_matrix()(0, 1), 1e-14);
  EXPECT_NEAR(oracle::quadrature_energy(A, B, C, ElasticMaterial(1.0, 0.0), Vec2(1, 0)), 3.0 / 8.0, 1e-15);
}

TEST(Triangle, DegenerateRejected) {
  try {
    triangle_condensed_stiffness(Point(0, 0), Point(1, 1), Point(2, 2), ElasticMaterial(1.0, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateTriangle);
  }
}

TEST(EdgeLoad, Examples) {
  EXPECT_EQ(consistent_edge_load(A, C, Vec2(0, 0), LoadMapping::VirtualWork).force.norm(), 0.0);
  EXPECT_EQ(consistent_edge_load(A, C, Vec2(0, 0), LoadMapping::PaperFormula).force.norm(), 0.0);
  const auto vw = consistent_edge_load(A, C, Vec2(1, 0), LoadMapping::VirtualWork).force;
  EXPECT_NEAR(vw(0), std::sqrt(5.0) / 2.0, 1e-15);
  EXPECT_EQ(vw(1), 0.0);
  const auto pf = consistent_edge_load(A, C, Vec2(1, 0), LoadMapping::PaperFormula).force;
  EXPECT_NEAR(pf(0), 2.5, 1e-15);
  EXPECT_EQ(load_mapping_from_string("paper-formula"), LoadMapping::PaperFormula);
}

TEST(Assembly, SingleTriangleMatchesCondensed) {
  const ElasticMaterial mat(3.0, 0.2);
  const auto sys = assemble(PlaneMesh::single_triangle(A, B, C), mat);
  ASSERT_EQ(sys.K.rows(), 2);
  const auto K = triangle_condensed_stiffness(A, B, C, mat);
  // free dofs are (x, y) of A; (n, t) = (y, x)
  EXPECT_NEAR(sys.K(1, 1), K.k_nn(), 1e-14);
  EXPECT_NEAR(sys.K(0, 0), K.k_tt(), 1e-14);
  EXPECT_NEAR(sys.K(0, 1), K.original_matrix()(0, 1), 1e-14);
}

TEST(Assembly, IndependentTrianglesAreBlockDiagonal) {
  PlaneMesh m;
  m.nodes = {A, B, C, Point(4, 0), Point(5, 0), Point(6, -1)};
  m.triangles = {{0, 2, 1}, {3, 5, 4}};
  m.gamma_u = {1, 2, 4, 5};
  const auto sys = assemble(m, ElasticMaterial(1.0, 0.25));
  ASSERT_EQ(sys.K.rows(), 4);
  EXPECT_EQ(sys.K.block(0, 2, 2, 2).norm(), 0.0);
  EXPECT_EQ(sys.K.block(2, 0, 2, 2).norm(), 0.0);
}

TEST(Assembly, FloatingBodyIsSingular) {
  // one clamped vertex leaves a rigid rotation
  PlaneMesh m = PlaneMesh::single_triangle(A, B, C);
  m.gamma_u = {1};
  try {
    assemble(m, ElasticMaterial(1.0, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularSystem);
  }
}

TEST(FemIncremental, ZeroLoad) {
  FemModel model(PlaneMesh::single_triangle(A, B, C), ElasticMaterial(1.0, 0.0));
  const auto res = model.solve_incremental(load4(0, 0, 0, 0), {0.0}, 0.5);
  EXPECT_TRUE(res.converged);
  EXPECT_EQ(res.u.norm(), 0.0);
}

TEST(FemIncremental, MatchesDiscreteProblem) {
  testkit::Rng rng(8);
  for (int k = 0; k < 30; ++k) {
    const ElasticMaterial mat(testkit::uniform(rng, 0.5, 4.0), testkit::uniform(rng, 0.0, 0.4));
    const Vec2 T = testkit::random_vec(rng, 2.0);
    const double w = testkit::uniform(rng, -0.3, 0.3);
    const auto K = triangle_condensed_stiffness(A, B, C, mat);
    const double f = testkit::uniform(rng, 0.0, 0.95) * *critical_friction(K);
    const Vec2 fa = consistent_edge_load(A, C, T, LoadMapping::VirtualWork).force;
    const auto discrete = solve_incremental(K, Vec2(fa(1), fa(0)), w, f);
    FemModel model(PlaneMesh::single_triangle(A, B, C), mat);
    const auto fem = model.solve_incremental(load4(0, 0, T(0), T(1)), {w}, f);
    EXPECT_TRUE(fem.converged);
    EXPECT_LE((fem.contact[0].u - discrete.state.u).norm(), 1e-8) << k;
  }
}

TEST(FemIncremental, FrictionlessStripMatchesQp) {
  const PlaneMesh mesh = strip();
  const ElasticMaterial mat(1.0, 0.3);
  FemModel model(mesh, mat);
  const VecX load = load4(0.0, -0.5, 0.3, 1.0);
  const auto fem = model.solve_incremental(load, {0.0}, 0.0);
  ASSERT_TRUE(fem.converged);
  // the frictionless problem as a dense QP over free dofs with u_y <= 0 at the contact node
  const auto sys = assemble(mesh, mat);
  const VecX forces = nodal_load(mesh, Vec2(0.0, -0.5), Vec2(0.3, 1.0), LoadMapping::VirtualWork);
  VecX F(sys.K.rows()), upper = VecX::Constant(sys.K.rows(), std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < F.size(); ++i) F(i) = forces(sys.global_of[i]);
  for (Eigen::Index i = 0; i < F.size(); ++i) {
    if (sys.global_of[i] == 2 * 3 + 1) upper(i) = 0.0;
  }
  const VecX x = oracle::projected_gradient_qp(sys.K, F, upper);
  for (Eigen::Index i = 0; i < F.size(); ++i) EXPECT_NEAR(fem.u(sys.global_of[i]), x(i), 1e-6);
}

TEST(FemMarch, ZeroLoadIsStatic) {
  FemModel model(PlaneMesh::single_triangle(A, B, C), ElasticMaterial(1.0, 0.0));
  const auto rep = march_fem(model, LoadPath::zero(1.0, 4), VecX(), 1.0, 20);
  for (const auto& u : rep.displacements) EXPECT_EQ(u.norm(), 0.0);
  EXPECT_TRUE(rep.jumps.empty());
}

TEST(FemMarch, SingleTriangleJump) {
  const ElasticMaterial mat(4.0, 0.0);
  const auto K = triangle_condensed_stiffness(A, B, C, mat);
  const double f = 3.5;
  const auto pj = paper_jump_scenario(K, 1.0, f);
  Eigen::MatrixXd map = Eigen::MatrixXd::Zero(4, 2);
  map(2, 1) = map(3, 0) = 2.0 / std::sqrt(5.0);
  const auto load = pj.load->mapped(map, VecX::Zero(4), {2, 2});
  FemModel model(PlaneMesh::single_triangle(A, B, C), mat);
  const auto rep = march_fem(model, load, VecX(), f, 400);
  ASSERT_EQ(rep.jumps.size(), 1u);
  EXPECT_EQ(rep.jumps[0].time, 1.0);
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    EXPECT_LE((rep.contact[i][0].u - paper_jump_state(K, 1.0, f, rep.times[i]).u).norm(), 1e-6);
  }
  const auto traj = rep.node_trajectory(0);
  EXPECT_EQ(traj.jumps().size(), 1u);
}

TEST(FemMarch, FrictionlessCompressionGrowsContact) {
  // a row of three contact nodes on the top of two stacked strips
  PlaneMesh m;
  m.nodes = {Point(0, 0), Point(1, 0), Point(2, 0), Point(0, -1), Point(1, -1), Point(2, -1)};
  m.triangles = {{0, 3, 4}, {0, 4, 1}, {1, 4, 5}, {1, 5, 2}};
  m.gamma_u = {3, 4, 5};
  m.gamma_t_edges = {{0, 1}, {1, 2}};
  for (int j = 0; j < 3; ++j) m.gamma_c.push_back({j, 0.02 * j, Vec2(0.0, 1.0)});
  FemModel model(m, ElasticMaterial(1.0, 0.25));
  const auto load = LoadPath::polyline({0.0, 1.0}, {load4(0, 0, 0, 0), load4(0, 0, 0.1, 0.5)}, {2, 2});
  const auto rep = march_fem(model, load, VecX(), 0.0, 40);
  EXPECT_TRUE(rep.residuals.pass);
  int previous = 0;
  for (const auto& contact : rep.contact) {
    int active = 0;
    for (const auto& c : contact) active += c.t_n() < 0.0 ? 1 : 0;
    EXPECT_GE(active, previous);
    previous = active;
  }
  EXPECT_GT(previous, 0);
}

TEST(Mesh, JsonRoundTrip) {
  const auto mesh = PlaneMesh::single_triangle(A, B, C);
  const auto back = PlaneMesh::from_json(mesh.to_json());
  EXPECT_EQ(back.triangles, mesh.triangles);
  EXPECT_EQ(back.gamma_u, mesh.gamma_u);
  ASSERT_EQ(back.gamma_c.size(), 1u);
  EXPECT_EQ(back.gamma_c[0].tangent(), Vec2(1.0, 0.0));
}
