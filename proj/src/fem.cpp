#include "frictio/fem.hpp"

#include "frictio/incremental.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>

namespace frictio {

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b(0) - a(0)) * (c(1) - a(1)) - (c(0) - a(0)) * (b(1) - a(1)));
}

namespace {

void require_nondegenerate(const Point& a, const Point& b, const Point& c) {
  const double area = std::abs(signed_area(a, b, c));
  const double diam2 = std::max({(b - a).squaredNorm(), (c - b).squaredNorm(), (a - c).squaredNorm()});
  if (!(area > 1e-14 * diam2)) throw Error(ErrorCode::DegenerateTriangle, "triangle has (near) zero area");
}

Point point_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::ConfigError, "expected a point [x, y]");
  return Point(j[0].get<double>(), j[1].get<double>());
}

}  // namespace

void PlaneMesh::validate() const {
  const int n = static_cast<int>(nodes.size());
  auto in_range = [n](int i) { return i >= 0 && i < n; };
  if (n < 3 || triangles.empty()) throw Error(ErrorCode::InvalidArgument, "mesh needs nodes and triangles");
  for (const auto& tri : triangles) {
    for (int i : tri) {
      if (!in_range(i)) throw Error(ErrorCode::InvalidArgument, "triangle references a missing node");
    }
    const Point &a = nodes[tri[0]], &b = nodes[tri[1]], &c = nodes[tri[2]];
    require_nondegenerate(a, b, c);
    if (signed_area(a, b, c) < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "triangle is not positively oriented");
    }
  }
  if (gamma_u.empty()) throw Error(ErrorCode::InvalidArgument, "mesh has no clamped nodes");
  std::set<int> clamped(gamma_u.begin(), gamma_u.end());
  for (int i : gamma_u) {
    if (!in_range(i)) throw Error(ErrorCode::InvalidArgument, "clamped node out of range");
  }
  for (const auto& e : gamma_t_edges) {
    if (!in_range(e[0]) || !in_range(e[1]) || e[0] == e[1]) {
      throw Error(ErrorCode::InvalidArgument, "bad loaded edge");
    }
  }
  std::set<int> seen;
  for (const auto& c : gamma_c) {
    if (!in_range(c.node)) throw Error(ErrorCode::InvalidArgument, "contact node out of range");
    if (clamped.count(c.node)) throw Error(ErrorCode::InvalidArgument, "contact node is clamped");
    if (!seen.insert(c.node).second) throw Error(ErrorCode::InvalidArgument, "duplicate contact node");
    if (std::abs(c.normal.norm() - 1.0) > 1e-12) {
      throw Error(ErrorCode::InvalidArgument, "contact normal must be a unit vector");
    }
  }
}

PlaneMesh PlaneMesh::single_triangle(const Point& A, const Point& B, const Point& C) {
  require_nondegenerate(A, B, C);
  PlaneMesh m;
  m.nodes = {A, B, C};
  if (signed_area(A, B, C) > 0.0) m.triangles = {{0, 1, 2}};
  else m.triangles = {{0, 2, 1}};
  m.gamma_u = {1, 2};
  m.gamma_t_edges = {{0, 2}};
  m.gamma_c = {{0, 0.0, Vec2(0.0, 1.0)}};
  return m;
}

nlohmann::json PlaneMesh::to_json() const {
  nlohmann::json j;
  auto pts = nlohmann::json::array();
  for (const auto& p : nodes) pts.push_back({p(0), p(1)});
  j["nodes"] = pts;
  j["triangles"] = triangles;
  j["gamma_u"] = gamma_u;
  j["gamma_t_edges"] = gamma_t_edges;
  auto gc = nlohmann::json::array();
  for (const auto& c : gamma_c) {
    gc.push_back({{"node", c.node}, {"gap", c.gap}, {"normal", {c.normal(0), c.normal(1)}}});
  }
  j["gamma_c"] = gc;
  return j;
}

PlaneMesh PlaneMesh::from_json(const nlohmann::json& j) {
  PlaneMesh m;
  try {
    for (const auto& p : j.at("nodes")) m.nodes.push_back(point_from_json(p));
    m.triangles = j.at("triangles").get<std::vector<std::array<int, 3>>>();
    m.gamma_u = j.at("gamma_u").get<std::vector<int>>();
    if (j.contains("gamma_t_edges")) m.gamma_t_edges = j.at("gamma_t_edges").get<std::vector<std::array<int, 2>>>();
    if (j.contains("gamma_c")) {
      for (const auto& c : j.at("gamma_c")) {
        ContactNode cn;
        cn.node = c.at("node").get<int>();
        cn.gap = c.value("gap", 0.0);
        if (c.contains("normal")) cn.normal = point_from_json(c.at("normal"));
        m.gamma_c.push_back(cn);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("mesh: ") + e.what());
  }
  m.validate();
  return m;
}

PlaneMesh PlaneMesh::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::ConfigError, "cannot open mesh file " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, path + ": " + e.what());
  }
  return from_json(j);
}

ElasticMaterial::ElasticMaterial(double E_, double nu_, Formulation form)
    : E(E_), nu(nu_), formulation(form) {
  if (!(E > 0.0) || !std::isfinite(E)) throw Error(ErrorCode::InvalidArgument, "E must be positive");
  if (!(nu >= 0.0 && nu < 0.5)) throw Error(ErrorCode::InvalidArgument, "nu must lie in [0, 0.5)");
}

Eigen::Matrix3d ElasticMaterial::D() const {
  Eigen::Matrix3d d = Eigen::Matrix3d::Zero();
  if (formulation == Formulation::PlaneStrain) {
    const double c = E / ((1.0 + nu) * (1.0 - 2.0 * nu));
    d << 1.0 - nu, nu, 0.0, nu, 1.0 - nu, 0.0, 0.0, 0.0, 0.5 * (1.0 - 2.0 * nu);
    d *= c;
  } else {
    const double c = E / (1.0 - nu * nu);
    d << 1.0, nu, 0.0, nu, 1.0, 0.0, 0.0, 0.0, 0.5 * (1.0 - nu);
    d *= c;
  }
  return d;
}

Eigen::Matrix<double, 3, 6> element_B(const Point& p0, const Point& p1, const Point& p2) {
  require_nondegenerate(p0, p1, p2);
  const double A2 = 2.0 * signed_area(p0, p1, p2);
  const std::array<const Point*, 3> p{&p0, &p1, &p2};
  Eigen::Matrix<double, 3, 6> B = Eigen::Matrix<double, 3, 6>::Zero();
  for (int i = 0; i < 3; ++i) {
    const Point& pj = *p[(i + 1) % 3];
    const Point& pk = *p[(i + 2) % 3];
    const double b = (pj(1) - pk(1)) / A2;  // d phi_i / dx
    const double c = (pk(0) - pj(0)) / A2;  // d phi_i / dy
    B(0, 2 * i) = b;
    B(1, 2 * i + 1) = c;
    B(2, 2 * i) = c;
    B(2, 2 * i + 1) = b;
  }
  return B;
}

Eigen::Matrix<double, 6, 6> element_stiffness(const Point& p0, const Point& p1, const Point& p2,
                                              const ElasticMaterial& mat) {
  const auto B = element_B(p0, p1, p2);
  return std::abs(signed_area(p0, p1, p2)) * B.transpose() * mat.D() * B;
}

StiffnessMatrix2 triangle_condensed_stiffness(const Point& A, const Point& B, const Point& C,
                                              const ElasticMaterial& mat) {
  const auto Ke = element_stiffness(A, B, C, mat);
  // vertex A block, reordered to (n, t) = (y, x)
  return StiffnessMatrix2(Ke(1, 1), 0.5 * (Ke(0, 1) + Ke(1, 0)), Ke(0, 0));
}

LoadMapping load_mapping_from_string(const std::string& s) {
  if (s == "virtual-work") return LoadMapping::VirtualWork;
  if (s == "paper-formula") return LoadMapping::PaperFormula;
  throw Error(ErrorCode::ConfigError, "unknown load mapping '" + s + "'");
}

const char* to_string(LoadMapping m) {
  return m == LoadMapping::VirtualWork ? "virtual-work" : "paper-formula";
}

EdgeLoad consistent_edge_load(const Point& A, const Point& C, const Vec2& T, LoadMapping mode) {
  const double L = (C - A).norm();
  if (!(L > 0.0)) throw Error(ErrorCode::InvalidArgument, "edge AC has zero length");
  const double w = mode == LoadMapping::VirtualWork ? 0.5 * L : 0.5 * L * L;
  return {w * T, mode};
}

MatX assemble_full(const PlaneMesh& mesh, const ElasticMaterial& mat) {
  const int n = static_cast<int>(mesh.nodes.size());
  MatX K = MatX::Zero(2 * n, 2 * n);
  for (const auto& tri : mesh.triangles) {
    const auto Ke = element_stiffness(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]], mat);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        K.block<2, 2>(2 * tri[a], 2 * tri[b]) += Ke.block<2, 2>(2 * a, 2 * b);
      }
    }
  }
  return K;
}

AssembledSystem assemble(const PlaneMesh& mesh, const ElasticMaterial& mat) {
  mesh.validate();
  const MatX Kfull = assemble_full(mesh, mat);
  const int ndof = static_cast<int>(Kfull.rows());
  std::vector<char> clamped(static_cast<std::size_t>(ndof), 0);
  for (int i : mesh.gamma_u) clamped[2 * i] = clamped[2 * i + 1] = 1;
  AssembledSystem sys;
  sys.free_of.assign(static_cast<std::size_t>(ndof), -1);
  for (int d = 0; d < ndof; ++d) {
    if (!clamped[d]) {
      sys.free_of[d] = static_cast<int>(sys.global_of.size());
      sys.global_of.push_back(d);
    }
  }
  const int nf = static_cast<int>(sys.global_of.size());
  sys.K.resize(nf, nf);
  for (int a = 0; a < nf; ++a) {
    for (int b = 0; b < nf; ++b) sys.K(a, b) = Kfull(sys.global_of[a], sys.global_of[b]);
  }
  if (nf > 0) {
    Eigen::SelfAdjointEigenSolver<MatX> es(sys.K, Eigen::EigenvaluesOnly);
    const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
    if (!(es.eigenvalues().minCoeff() > 1e-12 * lmax)) {
      throw Error(ErrorCode::SingularSystem, "clamped set leaves rigid modes");
    }
  }
  return sys;
}

Eigen::Vector3d element_stress(const PlaneMesh& mesh, const ElasticMaterial& mat, int tri,
                               const VecX& u) {
  const auto& t = mesh.triangles.at(static_cast<std::size_t>(tri));
  const auto B = element_B(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]);
  Eigen::Matrix<double, 6, 1> ue;
  for (int a = 0; a < 3; ++a) ue.segment<2>(2 * a) = u.segment<2>(2 * t[a]);
  return mat.D() * B * ue;
}

VecX nodal_load(const PlaneMesh& mesh, const Vec2& b, const Vec2& T, LoadMapping mode) {
  VecX f = VecX::Zero(2 * static_cast<Eigen::Index>(mesh.nodes.size()));
  for (const auto& tri : mesh.triangles) {
    const double area = std::abs(signed_area(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]));
    for (int i : tri) f.segment<2>(2 * i) += (area / 3.0) * b;
  }
  for (const auto& e : mesh.gamma_t_edges) {
    const double L = (mesh.nodes[e[1]] - mesh.nodes[e[0]]).norm();
    const double w = mode == LoadMapping::VirtualWork ? 0.5 * L : 0.5 * L * L;
    for (int i : e) f.segment<2>(2 * i) += w * T;
  }
  return f;
}

FemModel::FemModel(PlaneMesh mesh, ElasticMaterial mat, LoadMapping mode)
    : mesh_(std::move(mesh)), mat_(mat), mode_(mode) {
  sys_ = assemble(mesh_, mat_);
  const int nc = contact_count();
  std::vector<char> is_contact(sys_.global_of.size(), 0);
  for (const auto& c : mesh_.gamma_c) {
    for (int k = 0; k < 2; ++k) {
      const int fi = sys_.free_of[2 * c.node + k];
      cdofs_.push_back(fi);
      is_contact[fi] = 1;
    }
  }
  for (int fi = 0; fi < static_cast<int>(sys_.global_of.size()); ++fi) {
    if (!is_contact[fi]) idofs_.push_back(fi);
  }
  const auto nci = static_cast<Eigen::Index>(cdofs_.size());
  const auto nii = static_cast<Eigen::Index>(idofs_.size());
  R_ = MatX::Zero(nci, nci);
  for (int j = 0; j < nc; ++j) {
    const auto& c = mesh_.gamma_c[j];
    R_.block<1, 2>(2 * j, 2 * j) = c.normal.transpose();
    R_.block<1, 2>(2 * j + 1, 2 * j) = c.tangent().transpose();
  }
  MatX Kcc(nci, nci), Kci(nci, nii), Kii(nii, nii);
  for (Eigen::Index a = 0; a < nci; ++a) {
    for (Eigen::Index b = 0; b < nci; ++b) Kcc(a, b) = sys_.K(cdofs_[a], cdofs_[b]);
    for (Eigen::Index b = 0; b < nii; ++b) Kci(a, b) = sys_.K(cdofs_[a], idofs_[b]);
  }
  for (Eigen::Index a = 0; a < nii; ++a) {
    for (Eigen::Index b = 0; b < nii; ++b) Kii(a, b) = sys_.K(idofs_[a], idofs_[b]);
  }
  MatX schur = Kcc;
  if (nii > 0) {
    Kii_.compute(Kii);
    Kii_inv_Kic_ = Kii_.solve(Kci.transpose());
    schur -= Kci * Kii_inv_Kic_;
  } else {
    Kii_inv_Kic_ = MatX::Zero(0, nci);
  }
  S_ = R_ * schur * R_.transpose();
  S_ = 0.5 * (S_ + S_.transpose());

  const auto nf = static_cast<Eigen::Index>(sys_.global_of.size());
  load_to_free_ = MatX::Zero(nf, 4);
  for (int k = 0; k < 4; ++k) {
    Vec2 b = Vec2::Zero(), T = Vec2::Zero();
    if (k < 2) b(k) = 1.0; else T(k - 2) = 1.0;
    const VecX full = nodal_load(mesh_, b, T, mode_);
    for (Eigen::Index fi = 0; fi < nf; ++fi) load_to_free_(fi, k) = full(sys_.global_of[fi]);
  }
}

VecX FemModel::contact_force(const VecX& load) const {
  if (load.size() != 4) throw Error(ErrorCode::InvalidArgument, "FEM load vector is (b_x, b_y, T_x, T_y)");
  const VecX ff = load_to_free_ * load;
  VecX fc(static_cast<Eigen::Index>(cdofs_.size()));
  for (std::size_t a = 0; a < cdofs_.size(); ++a) fc(static_cast<Eigen::Index>(a)) = ff(cdofs_[a]);
  if (!idofs_.empty()) {
    VecX fi(static_cast<Eigen::Index>(idofs_.size()));
    for (std::size_t a = 0; a < idofs_.size(); ++a) fi(static_cast<Eigen::Index>(a)) = ff(idofs_[a]);
    fc -= Kii_inv_Kic_.transpose() * fi;
  }
  return R_ * fc;
}

StiffnessMatrix2 FemModel::node_stiffness(int j) const {
  const Mat2 b = S_.block<2, 2>(2 * j, 2 * j);
  return StiffnessMatrix2(b(0, 0), b(0, 1), b(1, 1));
}

VecX FemModel::reconstruct(const VecX& load, const VecX& uc_local) const {
  const VecX ucg = R_.transpose() * uc_local;
  VecX u = VecX::Zero(2 * static_cast<Eigen::Index>(mesh_.nodes.size()));
  for (std::size_t a = 0; a < cdofs_.size(); ++a) u(sys_.global_of[cdofs_[a]]) = ucg(static_cast<Eigen::Index>(a));
  if (!idofs_.empty()) {
    const VecX ff = load_to_free_ * load;
    VecX fi(static_cast<Eigen::Index>(idofs_.size()));
    for (std::size_t a = 0; a < idofs_.size(); ++a) fi(static_cast<Eigen::Index>(a)) = ff(idofs_[a]);
    const VecX ui = Kii_.solve(fi) - Kii_inv_Kic_ * ucg;
    for (std::size_t a = 0; a < idofs_.size(); ++a) u(sys_.global_of[idofs_[a]]) = ui(static_cast<Eigen::Index>(a));
  }
  return u;
}

VecX FemModel::contact_local(const VecX& u) const {
  VecX g(static_cast<Eigen::Index>(cdofs_.size()));
  for (std::size_t a = 0; a < cdofs_.size(); ++a) g(static_cast<Eigen::Index>(a)) = u(sys_.global_of[cdofs_[a]]);
  return R_ * g;
}

double FemModel::linear_compliance() const {
  MatX G(S_.rows(), 4);
  for (int k = 0; k < 4; ++k) G.col(k) = contact_force(VecX::Unit(4, k));
  const MatX resp = S_.ldlt().solve(G);
  Eigen::JacobiSVD<MatX> svd(resp);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

VecX FemModel::tresca(const VecX& Fc, const std::vector<double>& w_t, const std::vector<double>& sigma,
                      const FemOptions& opt, const VecX* start) const {
  const int nc = contact_count();
  VecX u = start ? *start : VecX::Zero(2 * nc);
  for (int sweep = 0; sweep < opt.inner_max_sweeps; ++sweep) {
    double change = 0.0;
    for (int j = 0; j < nc; ++j) {
      Vec2 Feff = Fc.segment<2>(2 * j);
      for (int k = 0; k < nc; ++k) {
        if (k != j) Feff -= S_.block<2, 2>(2 * j, 2 * k) * u.segment<2>(2 * k);
      }
      const Mat2 Kjj = S_.block<2, 2>(2 * j, 2 * j);
      const ContactState s = tresca_kernel(Kjj, Feff, w_t[j], sigma[j], mesh_.gamma_c[j].gap);
      change = std::max(change, inf_norm(s.u - u.segment<2>(2 * j)));
      u.segment<2>(2 * j) = s.u;
    }
    if (nc <= 1 || change <= opt.inner_tol * std::max(1.0, u.cwiseAbs().maxCoeff())) break;
  }
  return u;
}

ResidualReport FemModel::check_contact(const VecX& Fc, const VecX& uc, const std::vector<double>& w_t,
                                       double f, double tol, std::vector<ContactState>* states) const {
  const int nc = contact_count();
  const VecX t = S_ * uc - Fc;
  ResidualReport all;
  all.evaluate(tol);
  if (states) states->assign(static_cast<std::size_t>(nc), ContactState{});
  for (int j = 0; j < nc; ++j) {
    Vec2 Feff = Fc.segment<2>(2 * j);
    for (int k = 0; k < nc; ++k) {
      if (k != j) Feff -= S_.block<2, 2>(2 * j, 2 * k) * uc.segment<2>(2 * k);
    }
    const StiffnessMatrix2 Kj = node_stiffness(j);
    const double g = mesh_.gamma_c[j].gap;
    const Vec2 shift(g, 0.0);
    const ContactState st{uc.segment<2>(2 * j), t.segment<2>(2 * j)};
    const ContactState shifted{st.u - shift, st.t};
    const Vec2 Fs = Feff - Kj.original_matrix() * shift;
    all.merge(check_incremental_kkt(Kj, Fs, w_t[j], f, shifted, tol));
    if (states) (*states)[j] = st;
  }
  all.evaluate(tol);
  return all;
}

FemIncrementalResult FemModel::solve_incremental(const VecX& load, const std::vector<double>& w_t,
                                                 double f, const FemOptions& opt,
                                                 const std::vector<double>* sigma0) const {
  if (!(f >= 0.0) || !std::isfinite(f)) throw Error(ErrorCode::InvalidArgument, "friction coefficient must be >= 0");
  const int nc = contact_count();
  if (static_cast<int>(w_t.size()) != nc) throw Error(ErrorCode::InvalidArgument, "w_t needs one entry per contact node");
  const VecX Fc = contact_force(load);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> sigma = sigma0 ? *sigma0 : std::vector<double>(static_cast<std::size_t>(nc), inf);
  const double stol = opt.outer_tol * std::max(1.0, Fc.size() ? Fc.cwiseAbs().maxCoeff() : 0.0);

  FemIncrementalResult res;
  VecX u = VecX::Zero(2 * nc);
  for (int it = 1; it <= opt.outer_max_iters; ++it) {
    u = tresca(Fc, w_t, sigma, opt, &u);
    // a stuck configuration that already satisfies Coulomb's law is kept
    if (it == 1 && !sigma0 && check_contact(Fc, u, w_t, f, opt.kkt_tol, nullptr).pass) {
      res.outer_iterations = it;
      res.converged = true;
      break;
    }
    const VecX t = S_ * u - Fc;
    double change = 0.0;
    std::vector<double> next(static_cast<std::size_t>(nc));
    for (int j = 0; j < nc; ++j) {
      next[j] = f * pos_part(-t(2 * j));
      change = std::max(change, std::isfinite(sigma[j]) ? std::abs(next[j] - sigma[j]) : inf);
    }
    res.outer_iterations = it;
    if (change <= stol) {
      res.converged = true;
      break;
    }
    const bool damp = it > opt.damping_after;
    for (int j = 0; j < nc; ++j) {
      sigma[j] = (damp && std::isfinite(sigma[j])) ? sigma[j] + opt.damping * (next[j] - sigma[j]) : next[j];
    }
  }
  // the last Tresca solve is the answer; its own pressures define sigma
  const VecX t = S_ * u - Fc;
  res.sigma.resize(static_cast<std::size_t>(nc));
  for (int j = 0; j < nc; ++j) res.sigma[j] = f * pos_part(-t(2 * j));
  res.u = reconstruct(load, u);
  res.residuals = check_contact(Fc, u, w_t, f, opt.kkt_tol, &res.contact);
  if (!res.residuals.pass) res.converged = false;
  return res;
}

FemIncrementalResult solve_incremental_fem(const FemModel& model, const VecX& load,
                                           const std::vector<double>& w_t, double f,
                                           const FemOptions& opt) {
  return model.solve_incremental(load, w_t, f, opt);
}

Trajectory FemMarchReport::node_trajectory(int j) const {
  std::vector<ContactState> states;
  for (const auto& c : contact) states.push_back(c.at(static_cast<std::size_t>(j)));
  std::vector<Trajectory::JumpRecord> recs;
  for (std::size_t k = 0; k < jump_steps.size(); ++k) {
    const std::size_t i = jump_steps[k];
    const auto& left = jump_left_contact[k][static_cast<std::size_t>(j)];
    if ((left.u - states[i].u).norm() > 0.0) recs.push_back({times[i], left, states[i]});
  }
  return Trajectory(times, std::move(states), std::move(recs), Interpolation::PiecewiseConstant);
}

void FemMarchReport::write_csv(std::ostream& os, const FemModel& model) const {
  const auto& mesh = model.mesh();
  const int nn = static_cast<int>(mesh.nodes.size());
  std::vector<int> contact_index(static_cast<std::size_t>(nn), -1);
  for (std::size_t j = 0; j < mesh.gamma_c.size(); ++j) contact_index[mesh.gamma_c[j].node] = static_cast<int>(j);
  os << "s,node,u_x,u_y,t_n,t_t,is_jump_left_row\n";
  char buf[256];
  auto rows = [&](double s, const VecX& u, const std::vector<ContactState>& c, int flag) {
    for (int i = 0; i < nn; ++i) {
      double tn = 0.0, tt = 0.0;
      if (contact_index[i] >= 0) {
        tn = c[contact_index[i]].t_n();
        tt = c[contact_index[i]].t_t();
      }
      std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g,%.17g,%.17g,%d\n", s, i, u(2 * i), u(2 * i + 1), tn, tt,
                    flag);
      os << buf;
    }
  };
  std::size_t k = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (k < jump_steps.size() && jump_steps[k] == i) {
      rows(times[i], jump_left_displacements[k], jump_left_contact[k], 1);
      ++k;
    }
    rows(times[i], displacements[i], contact[i], 0);
  }
}

FemMarchReport march_fem(const FemModel& model, const LoadHistory& load, const VecX& u0_in, double f,
                         int m, const FemMarchOptions& opt) {
  if (!(f >= 0.0) || !std::isfinite(f)) throw Error(ErrorCode::InvalidArgument, "friction coefficient must be >= 0");
  if (load.dimension() != 4) throw Error(ErrorCode::InvalidArgument, "FEM load path is (b_x, b_y, T_x, T_y)");
  const int nc = model.contact_count();
  const auto ndof = 2 * static_cast<Eigen::Index>(model.mesh().nodes.size());
  const VecX u0 = u0_in.size() ? u0_in : VecX::Zero(ndof);
  if (u0.size() != ndof) throw Error(ErrorCode::InvalidArgument, "initial displacement has wrong size");

  const std::vector<double> grid = march_grid(load, m, opt.include_load_breakpoints);
  const std::size_t n = grid.size();
  std::vector<VecX> L(n);
  for (std::size_t i = 0; i < n; ++i) L[i] = load.value(grid[i]);

  auto tangential = [nc](const VecX& uc) {
    std::vector<double> w(static_cast<std::size_t>(nc));
    for (int j = 0; j < nc; ++j) w[j] = uc(2 * j + 1);
    return w;
  };

  FemMarchReport rep;
  {
    const VecX uc0 = model.contact_local(u0);
    const VecX Fc0 = model.contact_force(L[0]);
    std::vector<ContactState> st0;
    const ResidualReport adm = model.check_contact(Fc0, uc0, tangential(uc0), f, opt.tol, &st0);
    const VecX rebuilt = model.reconstruct(L[0], uc0);
    const double mismatch = (rebuilt - u0).cwiseAbs().maxCoeff();
    if (!adm.pass || mismatch > opt.tol * std::max(1.0, u0.cwiseAbs().maxCoeff())) {
      throw Error(ErrorCode::InadmissibleInitialCondition, "initial displacement is not an equilibrium at s = 0");
    }
    rep.displacements.push_back(rebuilt);
    rep.contact.push_back(st0);
  }
  const double base = load.total_variation() / (m + 1);
  const double C = model.linear_compliance();
  auto local_u = [](const std::vector<ContactState>& c) {
    VecX v(2 * static_cast<Eigen::Index>(c.size()));
    for (std::size_t j = 0; j < c.size(); ++j) v.segment<2>(2 * static_cast<Eigen::Index>(j)) = c[j].u;
    return v;
  };
  auto is_jump = [&](const VecX& du, std::size_t i) {
    return du.norm() > opt.jump_factor * C * (load.norm(L[i] - L[i - 1]) + base);
  };
  auto solve = [&](std::size_t i, const std::vector<double>& w, const std::vector<double>* sigma0) {
    auto r = model.solve_incremental(L[i], w, f, opt.fem, sigma0);
    if (!r.converged) {
      throw Error(ErrorCode::NonConvergence,
                  "FEM incremental solve did not converge at s = " + std::to_string(grid[i]) + ": " +
                      r.residuals.summary());
    }
    rep.max_outer_iterations = std::max(rep.max_outer_iterations, r.outer_iterations);
    return r;
  };

  std::vector<ResidualReport> step_reports(n);
  for (std::size_t i = 1; i < n; ++i) {
    const VecX prev = local_u(rep.contact[i - 1]);
    auto r = solve(i, tangential(prev), nullptr);
    if (opt.relocate_jumps && i >= 2 && is_jump(local_u(r.contact) - prev, i)) {
      // restart the previous step from the post-jump pressures
      const auto alt = solve(i - 1, tangential(local_u(rep.contact[i - 2])), &r.sigma);
      const VecX ua = local_u(alt.contact);
      const auto nxt = solve(i, tangential(ua), nullptr);
      if (!is_jump(local_u(nxt.contact) - ua, i) && (ua - prev).norm() > 0.0) {
        rep.displacements[i - 1] = alt.u;
        rep.contact[i - 1] = alt.contact;
        step_reports[i - 1] = alt.residuals;
        r = nxt;
      }
    }
    rep.displacements.push_back(r.u);
    rep.contact.push_back(r.contact);
    step_reports[i] = r.residuals;
  }
  rep.times = grid;
  rep.residuals.evaluate(opt.tol);
  for (std::size_t i = 1; i < n; ++i) {
    rep.residuals.merge(step_reports[i]);
    const VecX du = local_u(rep.contact[i]) - local_u(rep.contact[i - 1]);
    const double dL = load.norm(L[i] - L[i - 1]);
    if (dL > 0.0) rep.stability_constant = std::max(rep.stability_constant, du.norm() / dL);
    if (is_jump(du, i)) {
      rep.jumps.push_back({grid[i], du.norm()});
      rep.jump_steps.push_back(i);
      rep.jump_left_displacements.push_back(rep.displacements[i - 1]);
      rep.jump_left_contact.push_back(rep.contact[i - 1]);
    }
  }
  rep.residuals.evaluate(opt.tol);
  return rep;
}

}  // namespace frictio
