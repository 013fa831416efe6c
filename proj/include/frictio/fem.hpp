#pragma once

#include "frictio/core.hpp"
#include "frictio/load_path.hpp"
#include "frictio/march.hpp"
#include "frictio/residuals.hpp"
#include "frictio/trajectory.hpp"

#include <json.hpp>

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace frictio {

using Point = Eigen::Vector2d;
using MatX = Eigen::MatrixXd;

struct ContactNode {
  int node = 0;
  double gap = 0.0;
  Vec2 normal = Vec2(0.0, 1.0);

  // tangent obtained by rotating the normal clockwise: +x for n = +y
  Vec2 tangent() const { return Vec2(normal(1), -normal(0)); }
};

struct PlaneMesh {
  std::vector<Point> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> gamma_u;                     // clamped nodes
  std::vector<std::array<int, 2>> gamma_t_edges;  // loaded edges
  std::vector<ContactNode> gamma_c;

  // throws InvalidArgument / DegenerateTriangle on broken invariants
  void validate() const;

  // Triangle ABC clamped at B and C, loaded on AC, in contact at A with
  // the half-plane y >= gap.
  static PlaneMesh single_triangle(const Point& A, const Point& B, const Point& C);

  nlohmann::json to_json() const;
  static PlaneMesh from_json(const nlohmann::json& j);
  static PlaneMesh load(const std::string& path);
};

enum class Formulation { PlaneStrain, PlaneStress };

struct ElasticMaterial {
  double E = 1.0;
  double nu = 0.0;
  Formulation formulation = Formulation::PlaneStrain;

  ElasticMaterial() = default;
  ElasticMaterial(double E_, double nu_, Formulation form = Formulation::PlaneStrain);

  // Voigt constitutive matrix for (eps_xx, eps_yy, 2 eps_xy)
  Eigen::Matrix3d D() const;
};

double signed_area(const Point& a, const Point& b, const Point& c);

// 6x6 P1 stiffness, dof order (x0, y0, x1, y1, x2, y2)
Eigen::Matrix<double, 6, 6> element_stiffness(const Point& p0, const Point& p1, const Point& p2,
                                              const ElasticMaterial& mat);
// 3x6 strain-displacement matrix
Eigen::Matrix<double, 3, 6> element_B(const Point& p0, const Point& p1, const Point& p2);

// Stiffness felt at the free vertex A of the triangle ABC clamped at B and C,
// in (n, t) = (y, x) coordinates.
StiffnessMatrix2 triangle_condensed_stiffness(const Point& A, const Point& B, const Point& C,
                                              const ElasticMaterial& mat);

enum class LoadMapping { VirtualWork, PaperFormula };
LoadMapping load_mapping_from_string(const std::string& s);
const char* to_string(LoadMapping m);

struct EdgeLoad {
  Vec2 force;  // nodal force at A in (x, y)
  LoadMapping mode;
};

// Nodal force at A from a constant traction T on the edge AC.
EdgeLoad consistent_edge_load(const Point& A, const Point& C, const Vec2& T, LoadMapping mode);

// Full 2N x 2N stiffness, no boundary conditions.
MatX assemble_full(const PlaneMesh& mesh, const ElasticMaterial& mat);

struct AssembledSystem {
  MatX K;                    // over free dofs
  std::vector<int> free_of;  // global dof -> free index, -1 when clamped
  std::vector<int> global_of;
};

// Stiffness on the free dofs with Gamma_U rows and columns removed.
AssembledSystem assemble(const PlaneMesh& mesh, const ElasticMaterial& mat);

// Constant stress of a triangle under nodal displacement u (size 2N).
Eigen::Vector3d element_stress(const PlaneMesh& mesh, const ElasticMaterial& mat, int tri,
                               const VecX& u);

// Nodal forces (size 2N) of a uniform volume force b and a uniform traction
// T on the Gamma_T edges.
VecX nodal_load(const PlaneMesh& mesh, const Vec2& b, const Vec2& T, LoadMapping mode);

struct FemOptions {
  double inner_tol = 1e-12;
  int inner_max_sweeps = 100000;
  double outer_tol = 1e-12;
  int outer_max_iters = 10000;
  int damping_after = 100;
  double damping = 0.5;
  double kkt_tol = 1e-8;
};

struct FemIncrementalResult {
  VecX u;                               // nodal displacements, size 2N
  std::vector<ContactState> contact;    // per Gamma_C node, local (n, t)
  std::vector<double> sigma;
  bool converged = false;
  int outer_iterations = 0;
  ResidualReport residuals;
};

// The elastic body reduced onto its contact nodes. The load vector is
// (b_x, b_y, T_x, T_y): a uniform volume force and a uniform traction on
// Gamma_T.
class FemModel {
 public:
  FemModel(PlaneMesh mesh, ElasticMaterial mat, LoadMapping mode = LoadMapping::VirtualWork);

  const PlaneMesh& mesh() const { return mesh_; }
  const ElasticMaterial& material() const { return mat_; }
  LoadMapping mapping() const { return mode_; }
  int contact_count() const { return static_cast<int>(mesh_.gamma_c.size()); }

  // condensed contact stiffness in local (n, t) blocks
  const MatX& contact_stiffness() const { return S_; }
  // condensed contact force for a load vector (b, T)
  VecX contact_force(const VecX& load) const;
  // 2x2 block of the condensed stiffness at contact node j
  StiffnessMatrix2 node_stiffness(int j) const;

  // nodal displacement from contact displacements (local (n, t) per node)
  VecX reconstruct(const VecX& load, const VecX& uc_local) const;
  // contact displacements in local coordinates from a nodal field
  VecX contact_local(const VecX& u) const;
  // per-node largest displacement response to a unit load component
  double linear_compliance() const;

  FemIncrementalResult solve_incremental(const VecX& load, const std::vector<double>& w_t,
                                         double f, const FemOptions& opt = {},
                                         const std::vector<double>* sigma0 = nullptr) const;

  // Tresca inner problem with fixed per-node bounds, block Gauss-Seidel
  VecX tresca(const VecX& Fc, const std::vector<double>& w_t, const std::vector<double>& sigma,
              const FemOptions& opt, const VecX* start = nullptr) const;

  // per-node KKT of a contact configuration
  ResidualReport check_contact(const VecX& Fc, const VecX& uc, const std::vector<double>& w_t,
                               double f, double tol, std::vector<ContactState>* states) const;

 private:
  PlaneMesh mesh_;
  ElasticMaterial mat_;
  LoadMapping mode_;
  AssembledSystem sys_;
  std::vector<int> cdofs_;  // free indices of contact dofs (x, y per node)
  std::vector<int> idofs_;  // remaining free dofs
  MatX R_;                  // global (x, y) -> local (n, t) on contact dofs
  MatX S_;
  MatX Kii_inv_Kic_;
  Eigen::LDLT<MatX> Kii_;
  MatX load_to_free_;  // free nodal forces per unit load component (columns)
};

FemIncrementalResult solve_incremental_fem(const FemModel& model, const VecX& load,
                                           const std::vector<double>& w_t, double f,
                                           const FemOptions& opt = {});

struct FemMarchReport {
  std::vector<double> times;
  std::vector<VecX> displacements;                 // nodal, per breakpoint
  std::vector<std::vector<ContactState>> contact;  // per breakpoint, per node
  std::vector<JumpInfo> jumps;
  std::vector<std::size_t> jump_steps;
  std::vector<VecX> jump_left_displacements;
  std::vector<std::vector<ContactState>> jump_left_contact;
  double stability_constant = 0.0;
  ResidualReport residuals;
  int max_outer_iterations = 0;

  // piecewise-constant trajectory of contact node j in local coordinates
  Trajectory node_trajectory(int j) const;
  void write_csv(std::ostream& os, const FemModel& model) const;
};

struct FemMarchOptions {
  double jump_factor = 20.0;
  bool relocate_jumps = true;
  bool include_load_breakpoints = true;
  double tol = 1e-8;
  FemOptions fem{};
};

// u0: nodal displacement (size 2N) admissible at load(0); empty means zero
FemMarchReport march_fem(const FemModel& model, const LoadHistory& load, const VecX& u0,
                         double f, int m, const FemMarchOptions& opt = {});

}  // namespace frictio
