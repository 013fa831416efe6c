#include "frictio/incremental.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

namespace frictio {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::Separated: return "separated";
    case Regime::Stick: return "stick";
    case Regime::SlipPositive: return "slip-positive";
    case Regime::SlipNegative: return "slip-negative";
  }
  return "unknown";
}

ContactState tresca_kernel(const Mat2& K, const Vec2& F_in, double w, double sigma, double gap,
                           Regime* regime) {
  const double inf = std::numeric_limits<double>::infinity();
  // shift so that the obstacle sits at v_n = 0
  const Vec2 F = F_in - K.col(0) * gap;
  const double kmax = std::max(K(0, 0), K(1, 1));
  const double det = K(0, 0) * K(1, 1) - K(0, 1) * K(1, 0);
  const bool finite_sigma = std::isfinite(sigma);

  struct Candidate {
    Vec2 v, t;
    Regime regime;
    double violation;
  };
  std::array<Candidate, 6> cands;
  int count = 0;

  // free stick
  {
    const double vn = (F(0) - K(0, 1) * w) / K(0, 0);
    const Vec2 t(0.0, K(1, 0) * vn + K(1, 1) * w - F(1));
    const double viol = std::max(pos_part(vn) * kmax, finite_sigma ? pos_part(std::abs(t(1)) - sigma) : 0.0);
    cands[count++] = {Vec2(vn, w), t, Regime::Separated, viol};
  }
  // contact stick
  {
    const Vec2 v(0.0, w);
    const Vec2 t = K * v - F;
    const double viol = std::max(pos_part(t(0)), finite_sigma ? pos_part(std::abs(t(1)) - sigma) : 0.0);
    cands[count++] = {v, t, Regime::Stick, viol};
  }
  if (finite_sigma) {
    for (double s : {1.0, -1.0}) {
      const Regime rg = s > 0 ? Regime::SlipPositive : Regime::SlipNegative;
      // free slip: K v = F - s sigma e_t
      {
        const Vec2 rhs(F(0), F(1) - s * sigma);
        const Vec2 v((K(1, 1) * rhs(0) - K(0, 1) * rhs(1)) / det, (K(0, 0) * rhs(1) - K(1, 0) * rhs(0)) / det);
        const double viol = std::max(pos_part(v(0)) * kmax, pos_part(-s * (v(1) - w)) * kmax);
        cands[count++] = {v, Vec2(0.0, -s * sigma), rg, viol};
      }
      // contact slip
      {
        const double vt = (F(1) - s * sigma) / K(1, 1);
        const Vec2 t(K(0, 1) * vt - F(0), -s * sigma);
        const double viol = std::max(pos_part(t(0)), pos_part(-s * (vt - w)) * kmax);
        cands[count++] = {Vec2(0.0, vt), t, rg, viol};
      }
    }
  }
  int best = 0;
  double best_viol = inf;
  for (int k = 0; k < count; ++k) {
    if (cands[k].violation < best_viol) {
      best_viol = cands[k].violation;
      best = k;
    }
  }
  const auto& c = cands[best];
  if (regime) {
    Regime r = c.regime;
    if (r == Regime::Separated && c.v(1) != w) r = c.v(1) > w ? Regime::SlipPositive : Regime::SlipNegative;
    *regime = r;
  }
  return {Vec2(c.v(0) + gap, c.v(1)), c.t};
}

ContactState tresca_minimize(const TrescaProblem& p) {
  if (!(p.sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be >= 0");
  return tresca_kernel(p.K.original_matrix(), p.F, p.w_t, p.sigma);
}

double tresca_objective(const TrescaProblem& p, const Vec2& v) {
  const Mat2 K = p.K.original_matrix();
  const double slip = std::abs(v(1) - p.w_t);
  double fric = 0.0;
  if (slip > 0.0) fric = std::isfinite(p.sigma) ? p.sigma * slip : std::numeric_limits<double>::infinity();
  return 0.5 * v.dot(K * v) - p.F.dot(v) + fric;
}

double sigma_upper_bound(const StiffnessMatrix2& K, const Vec2& F_in, double w_in,
                         FrictionCoefficient f) {
  const Vec2 F = K.to_canonical(F_in);
  const double w = K.tangential_to_canonical(w_in);
  const double a = K.k_nt() * w - F(0);
  const double tangential = std::abs(K.k_tt() * w - F(1) - (K.k_nt() / K.k_nn()) * pos_part(a));
  return std::max(tangential, f.value() * neg_part(a));
}

double pressure_map(const TrescaProblem& p, FrictionCoefficient f) {
  const ContactState s = tresca_minimize(p);
  return f.value() * pos_part(-s.t_n());
}

ContactState SolutionSet::nearest(const Vec2& u) const {
  ContactState best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    const double d = (p.u - u).norm();
    if (d < best_d) {
      best_d = d;
      best = p;
    }
  }
  if (segment) {
    const auto& [a, b] = *segment;
    const Vec2 ab = b.u - a.u;
    const double len2 = ab.squaredNorm();
    double lam = len2 > 0.0 ? std::clamp((u - a.u).dot(ab) / len2, 0.0, 1.0) : 0.0;
    const ContactState q{a.u + lam * ab, a.t + lam * (b.t - a.t)};
    if ((q.u - u).norm() < best_d) best = q;
  }
  return best;
}

SolutionSet incremental_solution_set(const StiffnessMatrix2& K, const Vec2& F_in, double w_in,
                                     FrictionCoefficient f_in) {
  const double f = f_in.value();
  const Mat2 Kc = K.matrix();
  const Vec2 F = K.to_canonical(F_in);
  const double w = K.tangential_to_canonical(w_in);
  const double knn = K.k_nn(), knt = K.k_nt(), ktt = K.k_tt();
  const double scale = std::max({1.0, inf_norm(F), K.max_abs_row_sum()});
  const double eps_force = 1e-11 * scale;
  const double eps_len = eps_force / K.max_diagonal();

  auto contact_state = [&](double ut) {
    const Vec2 u(0.0, ut);
    return ContactState{u, Kc * u - F};
  };

  std::vector<ContactState> cands;
  std::optional<std::pair<ContactState, ContactState>> segment;

  // separated (or grazing) configuration: t = 0
  {
    const Vec2 u = K.inverse() * F;
    if (u(0) <= eps_len) cands.push_back({Vec2(std::min(u(0), 0.0), u(1)), Vec2::Zero()});
  }
  // stick at the obstacle
  {
    const ContactState st = contact_state(w);
    if (st.t_n() <= eps_force && std::abs(st.t_t()) <= -f * st.t_n() + eps_force) cands.push_back(st);
  }
  // forward slip u_t > w with t_t = f t_n
  {
    const double D = ktt - f * knt;
    const double N = F(1) - f * F(0);
    if (std::abs(D) <= 1e-12 * ktt) {
      if (std::abs(N) <= eps_force && knt > 0.0) {
        const double ut_max = F(0) / knt;  // where t_n reaches 0
        if (ut_max > w + eps_len) {
          ContactState a = contact_state(w);
          ContactState b = contact_state(ut_max);
          b.t(0) = 0.0;
          segment = std::make_pair(a, b);
        }
      }
    } else {
      const double ut = N / D;
      const ContactState st = contact_state(ut);
      if (ut >= w - eps_len && st.t_n() <= eps_force) cands.push_back(st);
    }
  }
  // backward slip u_t < w with t_t = -f t_n
  {
    const double ut = (F(1) + f * F(0)) / (ktt + f * knt);
    const ContactState st = contact_state(ut);
    if (ut <= w + eps_len && st.t_n() <= eps_force) cands.push_back(st);
  }

  const StiffnessMatrix2 Kcan(knn, knt, ktt);
  SolutionSet out;
  out.segment = segment;
  for (const auto& c : cands) {
    if (!check_incremental_kkt(Kcan, F, w, f_in, c, 1e-10).pass) continue;
    bool dup = false;
    for (const auto& p : out.points) dup = dup || (p.u - c.u).norm() <= 10.0 * eps_len;
    if (segment) {
      SolutionSet seg_only;
      seg_only.segment = segment;
      dup = dup || (seg_only.nearest(c.u).u - c.u).norm() <= 10.0 * eps_len;
    }
    if (!dup) out.points.push_back(c);
  }
  if (K.flipped()) {
    for (auto& p : out.points) p = flip_tangential(p);
    if (out.segment) {
      out.segment->first = flip_tangential(out.segment->first);
      out.segment->second = flip_tangential(out.segment->second);
    }
  }
  return out;
}

Regime classify(const ContactState& s, double w_t, double tol) {
  const double lt = tol * std::max(1.0, s.u.cwiseAbs().maxCoeff());
  const double ft = tol * std::max(1.0, s.t.cwiseAbs().maxCoeff());
  if (std::abs(s.t_n()) <= ft && (s.u_n() < -lt || s.t.cwiseAbs().maxCoeff() <= ft)) {
    return Regime::Separated;
  }
  if (std::abs(s.u_t() - w_t) <= lt) return Regime::Stick;
  return s.u_t() > w_t ? Regime::SlipPositive : Regime::SlipNegative;
}

namespace {

struct FixedPoint {
  double sigma;
  int iterations;
};

// locate a root of g(sigma) = P(sigma) - sigma on [0, Sigma] by scan and
// bisection; smallest or largest root
std::optional<FixedPoint> scan_fixed_point(const TrescaProblem& base, FrictionCoefficient f,
                                           double Sigma, bool largest, const IncrementalOptions& opt,
                                           double ftol) {
  auto g = [&](double sigma) {
    TrescaProblem p = base;
    p.sigma = sigma;
    return pressure_map(p, f) - sigma;
  };
  const int n = std::max(2, opt.scan_points);
  std::vector<double> xs(n + 1), gs(n + 1);
  for (int k = 0; k <= n; ++k) {
    xs[k] = Sigma * k / n;
    gs[k] = g(xs[k]);
  }
  int evals = n + 1;
  auto refine = [&](int k) -> FixedPoint {
    double lo = xs[k], hi = xs[k + 1];
    double glo = gs[k];
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, Sigma); ++it) {
      const double mid = 0.5 * (lo + hi);
      const double gm = g(mid);
      ++evals;
      if ((gm > 0) == (glo > 0) && gm != 0.0) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
      }
    }
    return {0.5 * (lo + hi), evals};
  };
  std::vector<int> order(n + 1);
  for (int k = 0; k <= n; ++k) order[k] = largest ? n - k : k;
  for (int k : order) {
    if (std::abs(gs[k]) <= ftol) return FixedPoint{xs[k], evals};
    const int j = largest ? k - 1 : k;  // bracket [xs[j], xs[j+1]]
    if (j < 0 || j + 1 > n) continue;
    if ((gs[j] > 0) != (gs[j + 1] > 0)) return refine(j);
  }
  return std::nullopt;
}

}  // namespace

IncrementalSolution solve_incremental(const StiffnessMatrix2& K, const Vec2& F, double w_t,
                                      FrictionCoefficient f, Selection sel,
                                      const IncrementalOptions& opt) {
  const SolutionSet set = incremental_solution_set(K, F, w_t, f);
  const double Fscale = std::max(1.0, inf_norm(F));
  const double ftol = opt.tol * Fscale;
  const bool subcritical = K.k_nt() == 0.0 || f.value() * K.k_nt() < K.k_tt() * (1.0 - 1e-12);

  TrescaProblem base{K, F, w_t, 0.0};
  IncrementalSolution out;
  std::optional<double> sigma;

  if (subcritical) {
    double s = 0.0;
    for (int it = 1; it <= opt.max_iters; ++it) {
      base.sigma = s;
      const double next = pressure_map(base, f);
      out.iterations = it;
      if (std::abs(next - s) <= ftol) {
        sigma = next;
        break;
      }
      s = next;
    }
  }
  if (!sigma) {
    const double Sigma1 = sigma_upper_bound(K, F, w_t, f);
    double Sigma = Sigma1;
    const int probe = 64;
    for (int k = 0; k <= probe; ++k) {
      base.sigma = Sigma1 * k / probe;
      Sigma = std::max(Sigma, pressure_map(base, f));
    }
    const bool largest = sel.kind == Selection::Kind::LargestPressure;
    if (auto fp = scan_fixed_point(base, f, Sigma, largest, opt, ftol)) {
      sigma = fp->sigma;
      out.iterations += fp->iterations;
    }
  }
  if (!sigma && set.empty()) {
    throw Error(ErrorCode::NonConvergence, "no fixed point located within the iteration budget");
  }

  ContactState state;
  if (sel.kind == Selection::Kind::NearestTo && !set.empty()) {
    state = set.nearest(sel.target);
  } else if (sigma) {
    base.sigma = *sigma;
    state = tresca_minimize(base);
    if (!set.empty()) state = set.nearest(state.u);
  } else {
    state = set.nearest(Vec2::Zero());
  }

  const ResidualReport rep = check_incremental_kkt(K, F, w_t, f, state, 1e-10);
  if (!rep.pass) {
    throw Error(ErrorCode::NonConvergence, "incremental solution fails the KKT check: " + rep.summary());
  }
  out.state = state;
  out.sigma = f.value() * pos_part(-state.t_n());
  out.unique = subcritical || set.singleton();
  out.regime = classify(state, w_t, 1e-10);
  return out;
}

ContactState ContinuumFamily::state(double t_n) const {
  const double slack = 1e-12 * std::max(1.0, std::abs(t_n_min));
  if (t_n < t_n_min - slack || t_n > t_n_max + slack) {
    throw Error(ErrorCode::OutOfRange, "t_n outside the family interval");
  }
  const Vec2 tc(t_n, f * t_n);
  const Vec2 Fc = K.to_canonical(F);
  const Vec2 uc = K.inverse() * (Fc + tc);
  ContactState s{Vec2(0.0, uc(1)), tc};
  return K.flipped() ? flip_tangential(s) : s;
}

ContinuumFamily continuum_family(const StiffnessMatrix2& K, FrictionCoefficient f, double F_t) {
  if (!is_critical(K, f.value())) {
    throw Error(ErrorCode::NotCritical, "friction coefficient differs from k_tt/k_nt");
  }
  if (!(F_t > 0.0)) throw Error(ErrorCode::NonPositiveLoad, "tangential load must be positive");
  ContinuumFamily fam{Vec2::Zero(), 0.0, 0.0, K, f.value()};
  const double Fn = K.k_nt() * F_t / K.k_tt();
  fam.F = K.from_canonical(Vec2(Fn, F_t));
  fam.t_n_min = -Fn;
  fam.t_n_max = 0.0;
  return fam;
}

double lipschitz_probe(const StiffnessMatrix2& K, FrictionCoefficient f, int trials,
                       std::uint64_t seed) {
  if (auto fc = critical_friction(K); fc && !(f.value() < *fc)) {
    throw Error(ErrorCode::SupercriticalFriction, "lipschitz probe needs f below k_tt/k_nt");
  }
  const double scale = K.max_abs_row_sum();
  double best = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    // one independent stream per trial keeps results order independent
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> expo(-3.0, 0.0);
    const Vec2 F1(scale * unit(rng), scale * unit(rng));
    Vec2 dir(unit(rng), unit(rng));
    if (dir.norm() == 0.0) continue;
    dir.normalize();
    const Vec2 F2 = F1 + scale * std::pow(10.0, expo(rng)) * dir;
    const double dF = (F1 - F2).norm();
    if (dF == 0.0) continue;
    const auto s1 = solve_incremental(K, F1, 0.0, f);
    const auto s2 = solve_incremental(K, F2, 0.0, f);
    best = std::max(best, (s1.state.u - s2.state.u).norm() / dF);
  }
  return best;
}

}  // namespace frictio
