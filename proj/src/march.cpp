#include "frictio/march.hpp"

#include <algorithm>
#include <cmath>

namespace frictio {

namespace {

// largest |F(s) - F(a)| over [a, b[, probing one-sided limits at breakpoints
double piece_error(const LoadHistory& load, double a, double b, const std::vector<double>& bps) {
  const VecX Fa = load.value(a);
  double worst = load.norm(load.left_value(b) - Fa);
  for (double bp : bps) {
    if (bp > a && bp < b) {
      worst = std::max(worst, load.norm(load.left_value(bp) - Fa));
      worst = std::max(worst, load.norm(load.value(bp) - Fa));
    }
  }
  return worst;
}

}  // namespace

Subdivision build_subdivision(const LoadHistory& load, int m) {
  if (m < 0) throw Error(ErrorCode::InvalidArgument, "refinement parameter m must be >= 0");
  const double S = load.horizon();
  const double vS = load.total_variation();
  const double delta = vS / (m + 1);
  const auto bps = load.breakpoints();
  Subdivision sub;
  sub.m = m;
  sub.times.push_back(0.0);
  double v_prev = 0.0;
  while (sub.times.back() < S) {
    const double prev = sub.times.back();
    double s = vS > 0.0 ? load.level_crossing(prev, load.variation(0.0, prev) + delta) : S;
    // the rounded crossing may overshoot the level by a few ulps; pull it
    // back until the interpolation error on the piece is within delta
    double back = 0.0;
    for (int k = 0; k < 200 && vS > 0.0 && piece_error(load, prev, s, bps) > delta; ++k) {
      back = back == 0.0 ? std::nextafter(s, prev) - s : 2.0 * back;
      const double trial = s + back;
      if (!(trial > prev)) break;
      s = trial;
    }
    const double v = load.variation(0.0, s);
    sub.times.push_back(s);
    sub.gains.push_back(v - v_prev);
    v_prev = v;
    if (sub.times.size() > static_cast<std::size_t>(m) + 3) {
      throw Error(ErrorCode::NonConvergence, "subdivision does not terminate");
    }
  }
  return sub;
}

double interpolant_error(const LoadHistory& load, const std::vector<double>& times) {
  const auto bps = load.breakpoints();
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    worst = std::max(worst, piece_error(load, times[i], times[i + 1], bps));
  }
  return worst;
}

std::vector<double> march_grid(const LoadHistory& load, int m, bool include_load_breakpoints) {
  std::vector<double> grid = build_subdivision(load, m).times;
  if (!include_load_breakpoints) return grid;
  const double S = load.horizon();
  const double merge = 1e-12 * S;
  std::vector<double> kinks = load.breakpoints();
  std::vector<double> out;
  // load breakpoints win over nearby subdivision times
  std::vector<double> all;
  all.reserve(grid.size() + kinks.size());
  for (double s : grid) all.push_back(s);
  for (double s : kinks) all.push_back(s);
  std::sort(all.begin(), all.end());
  auto is_kink = [&](double s) { return std::binary_search(kinks.begin(), kinks.end(), s); };
  for (double s : all) {
    if (!out.empty() && s - out.back() <= merge) {
      if (is_kink(s) && !is_kink(out.back())) out.back() = s;
      continue;
    }
    out.push_back(s);
  }
  out.front() = 0.0;
  out.back() = S;
  return out;
}

double MarchReport::max_energy_residual() const {
  double r = 0.0;
  for (double e : energy_residuals) r = std::max(r, e);
  return r;
}

nlohmann::json MarchReport::to_json() const {
  nlohmann::json j;
  auto jumps_j = nlohmann::json::array();
  for (const auto& jp : jumps) jumps_j.push_back({{"time", jp.time}, {"magnitude", jp.magnitude}});
  j["jumps"] = jumps_j;
  j["stability_constant"] = stability_constant;
  j["energy_residuals"] = energy_residuals;
  j["max_energy_residual"] = max_energy_residual();
  j["non_unique_steps"] = non_unique_steps;
  j["steps"] = trajectory.size() == 0 ? 0 : trajectory.size() - 1;
  j["residuals"] = {{"equilibrium", residuals.equilibrium_normalized},
                    {"signorini", residuals.signorini_normalized},
                    {"friction_cone", residuals.friction_cone_normalized},
                    {"flow_rule", residuals.flow_rule_normalized},
                    {"continuity", residuals.continuity_normalized},
                    {"pass", residuals.pass}};
  return j;
}

MarchReport march(const StiffnessMatrix2& K, const LoadHistory& load, const ContactState& u0,
                  FrictionCoefficient f, int m, const MarchOptions& opt) {
  if (load.dimension() != 2) throw Error(ErrorCode::InvalidArgument, "load must be two-dimensional");
  const Vec2 F0 = as_vec2(load.value(0.0));
  const ResidualReport adm = check_incremental_kkt(K, F0, u0.u_t(), f, u0, opt.tol);
  if (!adm.pass) {
    throw Error(ErrorCode::InadmissibleInitialCondition,
                "initial state does not solve the problem at s = 0: " + adm.summary());
  }
  const std::vector<double> grid = march_grid(load, m, opt.include_load_breakpoints);
  const double base = load.total_variation() / (m + 1);
  const double compliance = 1.0 / K.min_eigenvalue();
  const std::size_t n = grid.size();

  std::vector<Vec2> F(n);
  for (std::size_t i = 0; i < n; ++i) F[i] = as_vec2(load.value(grid[i]));
  auto is_jump = [&](const Vec2& du, std::size_t i) {
    return du.norm() > opt.jump_factor * compliance * (load.norm(F[i] - F[i - 1]) + base);
  };

  MarchReport rep;
  rep.jump_threshold_base = opt.jump_factor * compliance * base;
  std::vector<ContactState> states(n);
  std::vector<char> unique(n, 1);
  states[0] = u0;
  for (std::size_t i = 1; i < n; ++i) {
    const ContactState& prev = states[i - 1];
    auto sol = solve_incremental(K, F[i], prev.u_t(), f, Selection::nearest(prev.u), opt.incremental);
    states[i] = sol.state;
    unique[i] = sol.unique;
    if (opt.relocate_jumps && i >= 2 && is_jump(states[i].u - prev.u, i)) {
      // a jump between grid points: move it onto s_{i-1} if a solution there
      // connects continuously to what follows
      const auto alt = solve_incremental(K, F[i - 1], states[i - 2].u_t(), f,
                                         Selection::nearest(states[i].u), opt.incremental);
      const auto next = solve_incremental(K, F[i], alt.state.u_t(), f, Selection::nearest(alt.state.u),
                                          opt.incremental);
      if (!is_jump(next.state.u - alt.state.u, i) && (alt.state.u - prev.u).norm() > 0.0) {
        states[i - 1] = alt.state;
        unique[i - 1] = alt.unique;
        states[i] = next.state;
        unique[i] = next.unique;
      }
    }
  }

  std::vector<Trajectory::JumpRecord> records;
  const Mat2 Km = K.original_matrix();
  for (std::size_t i = 1; i < n; ++i) {
    const Vec2 du = states[i].u - states[i - 1].u;
    const double dF = load.norm(F[i] - F[i - 1]);
    if (dF > 0.0) rep.stability_constant = std::max(rep.stability_constant, du.norm() / dF);
    if (is_jump(du, i)) {
      records.push_back({grid[i], states[i - 1], states[i]});
      rep.jumps.push_back({grid[i], du.norm()});
    }
    if (!unique[i]) rep.non_unique_steps.push_back(i);
    const ContactState& s = states[i];
    const double e = s.u.dot(Km * du) - F[i].dot(du) - s.t_n() * du(0) - f.value() * s.t_n() * std::abs(du(1));
    rep.energy_residuals.push_back(std::abs(e));
  }
  rep.trajectory = Trajectory(grid, std::move(states), std::move(records), Interpolation::PiecewiseConstant);
  rep.residuals = check_quasistatic(rep.trajectory, load, K, f, opt.tol);
  return rep;
}

namespace {

void require_supercritical(const StiffnessMatrix2& K, double f) {
  if (K.k_nt() == 0.0 || f * K.k_nt() < K.k_tt() * (1.0 - 1e-12)) {
    throw Error(ErrorCode::SubcriticalFriction, "the jumping solution needs f >= k_tt/k_nt");
  }
}

Vec2 jump_load(double R, double f, double s) {
  if (s <= 1.0) return Vec2(s * R / f, s * R);
  return Vec2(R / f + (s - 1.0), R + (f + 1.0) * (s - 1.0));
}

}  // namespace

ContactState paper_jump_state(const StiffnessMatrix2& K, double R, double f, double s) {
  const double knn = K.k_nn(), knt = K.k_nt(), ktt = K.k_tt();
  ContactState st;
  if (s < 1.0) {
    st.t = -jump_load(R, f, s);
  } else {
    const double d = s - 1.0;
    st.u(0) = (R * (ktt / f - knt) + (ktt - knt * (f + 1.0)) * d) / K.det();
    st.u(1) = (R * (knn - knt / f) + (knn * (f + 1.0) - knt) * d) / K.det();
  }
  return K.flipped() ? flip_tangential(st) : st;
}

PaperJump paper_jump_scenario(const StiffnessMatrix2& K, double R, FrictionCoefficient f_in) {
  const double f = f_in.value();
  if (!(R > 0.0)) throw Error(ErrorCode::InvalidArgument, "R must be positive");
  require_supercritical(K, f);
  auto orient = [&](const Vec2& v) -> VecX {
    const Vec2 o = K.from_canonical(v);
    return VecX(o);
  };
  std::vector<LoadPath::Segment> segs{
      {0.0, 1.0, orient(jump_load(R, f, 0.0)), orient(jump_load(R, f, 1.0))},
      {1.0, 2.0, orient(jump_load(R, f, 1.0)), orient(jump_load(R, f, 2.0))}};
  PaperJump out;
  out.load = std::make_shared<LoadPath>(2.0, std::move(segs));
  ContactState left;
  left.t = -jump_load(R, f, 1.0);
  if (K.flipped()) left = flip_tangential(left);
  std::vector<ContactState> states{paper_jump_state(K, R, f, 0.0), paper_jump_state(K, R, f, 1.0),
                                   paper_jump_state(K, R, f, 2.0)};
  std::vector<Trajectory::JumpRecord> jumps{{1.0, left, states[1]}};
  out.trajectory = Trajectory({0.0, 1.0, 2.0}, std::move(states), std::move(jumps),
                              Interpolation::PiecewiseAffine);
  return out;
}

ResidualReport no_continuation_witness(const StiffnessMatrix2& K, double R, FrictionCoefficient f,
                                       double epsilon) {
  require_supercritical(K, f.value());
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  const Vec2 F = K.from_canonical(jump_load(R, f.value(), 1.0 + epsilon));
  ContactState stuck;
  stuck.t = -F;
  return check_incremental_kkt(K, F, 0.0, f, stuck, 1e-12);
}

RateIndependenceResult rate_independence_check(const StiffnessMatrix2& K,
                                               std::shared_ptr<const LoadHistory> load,
                                               const ContactState& u0, FrictionCoefficient f, int m,
                                               const Reparametrization& reparam, double tol) {
  ReparametrizedLoad other(load, reparam);
  const MarchReport a = march(K, *load, u0, f, m);
  const MarchReport b = march(K, other, u0, f, m);
  RateIndependenceResult res;
  res.steps = a.trajectory.size();
  if (a.trajectory.size() != b.trajectory.size()) {
    res.max_difference = std::numeric_limits<double>::infinity();
    return res;
  }
  for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
    const auto& x = a.trajectory.states()[i];
    const auto& y = b.trajectory.states()[i];
    res.max_difference = std::max({res.max_difference, inf_norm(x.u - y.u), inf_norm(x.t - y.t)});
  }
  res.coincide = res.max_difference <= tol;
  return res;
}

bool rate_independence_probe(const StiffnessMatrix2& K, std::shared_ptr<const LoadHistory> load,
                             const ContactState& u0, FrictionCoefficient f, int m,
                             const Reparametrization& reparam) {
  return rate_independence_check(K, std::move(load), u0, f, m, reparam).coincide;
}

}  // namespace frictio
