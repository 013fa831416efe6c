#include "frictio/residuals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace frictio {

double ResidualReport::max_normalized() const {
  return std::max({equilibrium_normalized, signorini_normalized, friction_cone_normalized,
                   flow_rule_normalized, continuity_normalized});
}

std::string ResidualReport::worst_law() const {
  const std::pair<double, const char*> laws[] = {
      {equilibrium_normalized, "equilibrium"}, {signorini_normalized, "signorini"},
      {friction_cone_normalized, "friction-cone"}, {flow_rule_normalized, "flow-rule"},
      {continuity_normalized, "continuity"}};
  const auto* best = &laws[0];
  for (const auto& l : laws) {
    if (l.first > best->first) best = &l;
  }
  return best->first > 0.0 ? best->second : "none";
}

void ResidualReport::evaluate(double tol_) {
  tol = tol_;
  equilibrium_pass = equilibrium_normalized <= tol;
  signorini_pass = signorini_normalized <= tol;
  friction_cone_pass = friction_cone_normalized <= tol;
  flow_rule_pass = flow_rule_normalized <= tol;
  continuity_pass = continuity_normalized <= tol;
  pass = equilibrium_pass && signorini_pass && friction_cone_pass && flow_rule_pass && continuity_pass;
}

void ResidualReport::merge(const ResidualReport& o) {
  equilibrium = std::max(equilibrium, o.equilibrium);
  signorini = std::max(signorini, o.signorini);
  friction_cone = std::max(friction_cone, o.friction_cone);
  flow_rule = std::max(flow_rule, o.flow_rule);
  continuity = std::max(continuity, o.continuity);
  equilibrium_normalized = std::max(equilibrium_normalized, o.equilibrium_normalized);
  signorini_normalized = std::max(signorini_normalized, o.signorini_normalized);
  friction_cone_normalized = std::max(friction_cone_normalized, o.friction_cone_normalized);
  flow_rule_normalized = std::max(flow_rule_normalized, o.flow_rule_normalized);
  continuity_normalized = std::max(continuity_normalized, o.continuity_normalized);
  scale = std::max(scale, o.scale);
  evaluate(std::max(tol, o.tol));
}

std::string ResidualReport::summary() const {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%s: equilibrium=%.3g signorini=%.3g friction-cone=%.3g flow-rule=%.3g continuity=%.3g "
                "(normalized, tol %.3g)",
                pass ? "pass" : "fail", equilibrium_normalized, signorini_normalized,
                friction_cone_normalized, flow_rule_normalized, continuity_normalized, tol);
  return buf;
}

namespace {

struct Accumulator {
  Mat2 K;
  double kl;     // |K|inf, turns lengths into forces
  double scale;  // force scale
  double f;
  ResidualReport rep;

  Accumulator(const StiffnessMatrix2& Ks, double f_, double force_scale)
      : K(Ks.original_matrix()), kl(Ks.max_abs_row_sum()), f(f_) {
    scale = std::max({1.0, force_scale, kl});
    rep.scale = scale;
  }

  void laws(const Vec2& F, const ContactState& st) {
    const double eq = inf_norm(K * st.u - F - st.t);
    rep.equilibrium = std::max(rep.equilibrium, eq);
    rep.equilibrium_normalized = std::max(rep.equilibrium_normalized, eq / scale);

    const double sig = std::max({pos_part(st.u_n()) * kl / scale, pos_part(st.t_n()) / scale,
                                 std::abs(st.u_n() * st.t_n()) * kl / (scale * scale)});
    rep.signorini = std::max(rep.signorini, sig);
    rep.signorini_normalized = std::max(rep.signorini_normalized, sig);

    const double cone = pos_part(std::abs(st.t_t()) + f * st.t_n());
    rep.friction_cone = std::max(rep.friction_cone, cone);
    rep.friction_cone_normalized = std::max(rep.friction_cone_normalized, cone / scale);
  }

  void flow(double du_t, const ContactState& st) {
    const double r = std::abs(st.t_t() * du_t - f * st.t_n() * std::abs(du_t));
    rep.flow_rule = std::max(rep.flow_rule, r);
    rep.flow_rule_normalized = std::max(rep.flow_rule_normalized, r * kl / (scale * scale));
  }

  void continuity(const Vec2& a, const Vec2& b) {
    const double d = inf_norm(a - b);
    rep.continuity = std::max(rep.continuity, d);
    rep.continuity_normalized = std::max(rep.continuity_normalized, d * kl / scale);
  }
};

}  // namespace

ResidualReport check_incremental_kkt(const StiffnessMatrix2& K, const Vec2& F, double w_t,
                                     FrictionCoefficient f, const ContactState& state,
                                     double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  Accumulator acc(K, f.value(), inf_norm(F));
  acc.laws(F, state);
  acc.flow(state.u_t() - w_t, state);
  acc.rep.evaluate(tol);
  return acc.rep;
}

ResidualReport check_quasistatic(const Trajectory& traj, const LoadHistory& load,
                                 const StiffnessMatrix2& K, FrictionCoefficient f, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  const double S = load.horizon();
  if (traj.size() == 0 || std::abs(traj.horizon() - S) > 1e-12 * std::max(1.0, S)) {
    throw Error(ErrorCode::MismatchedHorizon, "trajectory and load horizons differ");
  }
  if (load.dimension() != 2) throw Error(ErrorCode::InvalidArgument, "load must be two-dimensional");

  const auto& times = traj.times();
  const auto& states = traj.states();
  // the load is sampled where the checker evaluates it
  auto F_at = [&](double s) { return as_vec2(load.value(std::min(s, S))); };
  double fscale = 0.0;
  for (double s : times) fscale = std::max(fscale, inf_norm(F_at(s)));

  Accumulator acc(K, f.value(), fscale);
  const bool affine = traj.interpolation() == Interpolation::PiecewiseAffine;

  for (std::size_t i = 0; i < times.size(); ++i) {
    acc.laws(F_at(times[i]), states[i]);
    if (i == 0) continue;
    const auto* jr = traj.jump_at_index(i);
    if (!affine) {
      if (jr) acc.continuity(jr->left.u, states[i - 1].u);
      acc.flow(states[i].u_t() - states[i - 1].u_t(), states[i]);
      continue;
    }
    const double s0 = times[i - 1], s1 = times[i];
    const ContactState left = jr ? jr->left : states[i];
    const Vec2 F_left = as_vec2(load.left_value(std::min(s1, S)));
    if (jr) acc.laws(F_left, left);
    const double smid = 0.5 * (s0 + s1);
    const ContactState mid{0.5 * (states[i - 1].u + left.u), 0.5 * (states[i - 1].t + left.t)};
    acc.laws(F_at(smid), mid);
    const double du = left.u_t() - states[i - 1].u_t();
    acc.flow(du, states[i - 1]);
    acc.flow(du, left);
    if (jr) acc.flow(states[i].u_t() - left.u_t(), states[i]);
  }
  acc.rep.evaluate(tol);
  return acc.rep;
}

}  // namespace frictio
