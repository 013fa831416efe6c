#include "frictio/scenario.hpp"

#include "frictio/incremental.hpp"
#include "frictio/march.hpp"
#include "frictio/residuals.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace frictio::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ConfigError, "field '" + field + "': " + what);
}

template <class T>
T get_field(const nlohmann::json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    config_error(key, e.what());
  }
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::ConfigError, "cannot open " + path);
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, path + ": " + e.what());
  }
}

std::string resolve(const std::string& base_dir, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base_dir) / p).string();
}

int exit_for(const Error& e) {
  return e.code() == ErrorCode::NonConvergence ? kNonConvergence : kConfigError;
}

std::array<double, 3> parse_K(const std::string& s) {
  std::array<double, 3> k{};
  std::stringstream ss(s);
  std::string item;
  int n = 0;
  while (std::getline(ss, item, ',')) {
    if (n >= 3) config_error("K", "expected three comma-separated numbers k_nn,k_nt,k_tt");
    try {
      k[n++] = std::stod(item);
    } catch (const std::exception&) {
      config_error("K", "bad number '" + item + "'");
    }
  }
  if (n != 3) config_error("K", "expected three comma-separated numbers k_nn,k_nt,k_tt");
  return k;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::ConfigError, "cannot write " + path);
  os << text;
}

std::string with_suffix(const std::string& path, std::size_t index) {
  if (path.empty()) return path;
  fs::path p(path);
  return (p.parent_path() / (p.stem().string() + "." + std::to_string(index) + p.extension().string())).string();
}

}  // namespace

StiffnessMatrix2 Scenario::stiffness() const {
  if (!K) config_error("K", "stiffness required for kind '" + kind + "'");
  try {
    return StiffnessMatrix2((*K)[0], (*K)[1], (*K)[2]);
  } catch (const Error& e) {
    config_error("K", e.what());
  }
}

Interpolation Scenario::verify_interpolation() const {
  if (interpolation) return *interpolation;
  return kind == "paper-jump" ? Interpolation::PiecewiseAffine : Interpolation::PiecewiseConstant;
}

Scenario parse_scenario(const nlohmann::json& j, const std::string& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "scenario must be a JSON object");
  Scenario sc;
  static const std::vector<std::string> known{
      "kind", "K", "F", "w_t", "f", "R", "F_t", "samples", "m", "tol", "seed", "load", "load_file",
      "u0", "mesh", "mesh_file", "material", "mode", "interpolation", "out", "report",
      "left_continuous", "jump_factor"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) config_error(it.key(), "unknown field");
  }
  if (j.contains("kind")) sc.kind = get_field<std::string>(j, "kind");
  if (j.contains("K")) {
    const auto& k = j.at("K");
    if (k.is_string()) sc.K = parse_K(k.get<std::string>());
    else if (k.is_array() && k.size() == 3) sc.K = std::array<double, 3>{k[0].get<double>(), k[1].get<double>(), k[2].get<double>()};
    else if (k.is_array() && k.size() == 2 && k[0].is_array()) {
      sc.K = std::array<double, 3>{k[0][0].get<double>(), k[0][1].get<double>(), k[1][1].get<double>()};
    } else {
      config_error("K", "expected [k_nn, k_nt, k_tt], [[k_nn, k_nt], [k_nt, k_tt]] or \"a,b,c\"");
    }
  }
  if (j.contains("F")) {
    const auto v = get_field<std::vector<double>>(j, "F");
    if (v.size() != 2) config_error("F", "expected [F_n, F_t]");
    sc.F = Vec2(v[0], v[1]);
  }
  if (j.contains("w_t")) sc.w_t = get_field<double>(j, "w_t");
  if (j.contains("f")) {
    sc.f = get_field<double>(j, "f");
    sc.has_f = true;
  }
  if (j.contains("R")) sc.R = get_field<double>(j, "R");
  if (j.contains("F_t")) sc.F_t = get_field<double>(j, "F_t");
  if (j.contains("samples")) sc.samples = get_field<int>(j, "samples");
  if (j.contains("m")) {
    sc.m = get_field<int>(j, "m");
    sc.has_m = true;
  }
  if (j.contains("tol")) {
    sc.tol = get_field<double>(j, "tol");
    sc.has_tol = true;
  }
  if (j.contains("seed")) sc.seed = get_field<std::uint64_t>(j, "seed");
  if (j.contains("jump_factor")) sc.jump_factor = get_field<double>(j, "jump_factor");
  try {
    if (j.contains("load")) sc.load = std::make_shared<LoadPath>(LoadPath::from_json(j.at("load")));
    else if (j.contains("load_file")) {
      sc.load = std::make_shared<LoadPath>(
          LoadPath::from_json(read_json_file(resolve(base_dir, get_field<std::string>(j, "load_file")))));
    }
  } catch (const Error& e) {
    config_error("load", e.what());
  }
  if (j.contains("u0")) {
    const auto& u = j.at("u0");
    try {
      const auto uu = u.at("u").get<std::vector<double>>();
      const auto tt = u.value("t", std::vector<double>{0.0, 0.0});
      if (uu.size() != 2 || tt.size() != 2) config_error("u0", "expected {\"u\": [u_n, u_t], \"t\": [t_n, t_t]}");
      sc.u0 = {Vec2(uu[0], uu[1]), Vec2(tt[0], tt[1])};
    } catch (const nlohmann::json::exception& e) {
      config_error("u0", e.what());
    }
  }
  try {
    if (j.contains("mesh")) sc.mesh = PlaneMesh::from_json(j.at("mesh"));
    else if (j.contains("mesh_file")) sc.mesh = PlaneMesh::load(resolve(base_dir, get_field<std::string>(j, "mesh_file")));
  } catch (const Error& e) {
    config_error("mesh", e.what());
  }
  if (j.contains("material")) {
    const auto& m = j.at("material");
    try {
      Formulation form = Formulation::PlaneStrain;
      const std::string fname = m.value("formulation", std::string("plane-strain"));
      if (fname == "plane-stress") form = Formulation::PlaneStress;
      else if (fname != "plane-strain") config_error("material.formulation", "expected plane-strain or plane-stress");
      sc.material = ElasticMaterial(m.at("E").get<double>(), m.value("nu", 0.0), form);
    } catch (const nlohmann::json::exception& e) {
      config_error("material", e.what());
    } catch (const Error& e) {
      config_error("material", e.what());
    }
  }
  if (j.contains("mode")) sc.mode = load_mapping_from_string(get_field<std::string>(j, "mode"));
  if (j.contains("interpolation")) sc.interpolation = interpolation_from_string(get_field<std::string>(j, "interpolation"));
  if (j.contains("out")) sc.out = resolve(base_dir, get_field<std::string>(j, "out"));
  if (j.contains("report")) sc.report = resolve(base_dir, get_field<std::string>(j, "report"));
  if (j.contains("left_continuous")) sc.left_continuous = get_field<bool>(j, "left_continuous");
  return sc;
}

Scenario load_scenario(const std::string& path) {
  const auto dir = fs::path(path).parent_path().string();
  return parse_scenario(read_json_file(path), dir.empty() ? "." : dir);
}

void apply_override(Scenario& sc, const std::string& name, double value) {
  if (name == "f") {
    sc.f = value;
    sc.has_f = true;
  } else if (name == "m") {
    sc.m = static_cast<int>(value);
    sc.has_m = true;
  } else if (name == "R") {
    sc.R = value;
  } else if (name == "tol") {
    sc.tol = value;
    sc.has_tol = true;
  } else if (name == "seed") {
    sc.seed = static_cast<std::uint64_t>(value);
  } else if (name == "F_t") {
    sc.F_t = value;
  } else {
    config_error(name, "cannot be swept (use f, m, R, tol, seed or F_t)");
  }
}

namespace {

std::string residual_text(const ResidualReport& r) {
  return fmt6(r.max_normalized()) + " (" + r.worst_law() + ")";
}

RunResult run_critical(const Scenario& sc) {
  const auto fc = critical_friction(sc.stiffness());
  RunResult r;
  r.summary = fc ? "f_crit = " + fmt17(*fc) : "f_crit = unbounded";
  if (!sc.out.empty()) write_text(sc.out, r.summary + "\n");
  return r;
}

RunResult run_incremental(const Scenario& sc) {
  const auto K = sc.stiffness();
  const auto sol = solve_incremental(K, sc.F, sc.w_t, sc.f);
  const auto rep = check_incremental_kkt(K, sc.F, sc.w_t, sc.f, sol.state, sc.has_tol ? sc.tol : 1e-10);
  nlohmann::json j{{"u", {sol.state.u(0), sol.state.u(1)}},
                   {"t", {sol.state.t(0), sol.state.t(1)}},
                   {"regime", to_string(sol.regime)},
                   {"unique", sol.unique},
                   {"sigma", sol.sigma},
                   {"iterations", sol.iterations},
                   {"max_residual", rep.max_normalized()}};
  if (!sc.out.empty()) write_text(sc.out, j.dump(2) + "\n");
  RunResult r;
  r.exit_code = rep.pass ? kPass : kResidualFailure;
  r.summary = "u = (" + fmt17(sol.state.u(0)) + ", " + fmt17(sol.state.u(1)) + "), t = (" + fmt17(sol.state.t(0)) +
              ", " + fmt17(sol.state.t(1)) + "), regime " + to_string(sol.regime) +
              (sol.unique ? ", unique" : ", not unique") + ", max residual " + residual_text(rep);
  return r;
}

RunResult run_continuum(const Scenario& sc) {
  const auto K = sc.stiffness();
  const auto fam = continuum_family(K, sc.f, sc.F_t);
  const int n = std::max(2, sc.samples);
  std::ostringstream os;
  os << "t_n,u_n,u_t,t_t,kkt_pass\n";
  bool all = true;
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    const double tn = fam.t_n_min + (fam.t_n_max - fam.t_n_min) * k / (n - 1);
    const auto st = fam.state(tn);
    const auto rep = check_incremental_kkt(K, fam.F, 0.0, sc.f, st, sc.has_tol ? sc.tol : 1e-10);
    all = all && rep.pass;
    worst = std::max(worst, rep.max_normalized());
    os << fmt17(st.t_n()) << ',' << fmt17(st.u_n()) << ',' << fmt17(st.u_t()) << ',' << fmt17(st.t_t()) << ','
       << (rep.pass ? 1 : 0) << '\n';
  }
  if (!sc.out.empty()) write_text(sc.out, os.str());
  RunResult r;
  r.exit_code = all ? kPass : kResidualFailure;
  r.summary = "F = (" + fmt17(fam.F(0)) + ", " + fmt17(fam.F(1)) + "), " + std::to_string(n) +
              " members, max residual " + fmt6(worst) + (all ? ", all pass" : ", failures");
  return r;
}

void write_left_continuous(const Trajectory& traj, const std::string& path) {
  std::vector<ContactState> states;
  for (std::size_t i = 0; i < traj.size(); ++i) states.push_back(i == 0 ? traj.states()[0] : traj.states()[i - 1]);
  Trajectory left(traj.times(), std::move(states), {}, Interpolation::PiecewiseConstant);
  left.write_csv(path);
}

RunResult run_march(const Scenario& sc) {
  const auto K = sc.stiffness();
  if (!sc.load) config_error("load", "march needs a load path");
  MarchOptions opt;
  opt.tol = sc.tol;
  opt.jump_factor = sc.jump_factor;
  const auto rep = march(K, *sc.load, sc.u0, sc.f, sc.m, opt);
  if (!sc.out.empty()) {
    if (sc.left_continuous) write_left_continuous(rep.trajectory, sc.out);
    else rep.trajectory.write_csv(sc.out);
  }
  if (!sc.report.empty()) write_text(sc.report, rep.to_json().dump(2) + "\n");
  const double energy = rep.max_energy_residual();
  RunResult r;
  r.exit_code = rep.residuals.pass ? kPass : kResidualFailure;
  r.summary = "jumps " + std::to_string(rep.jumps.size()) + ", max residual " + residual_text(rep.residuals) +
              ", energy residual " + fmt6(energy) + ", stability constant " + fmt6(rep.stability_constant) + ", steps " +
              std::to_string(rep.trajectory.size() - 1);
  return r;
}

RunResult run_paper_jump(const Scenario& sc) {
  const auto K = sc.stiffness();
  const auto pj = paper_jump_scenario(K, sc.R, sc.f);
  MarchOptions opt;
  opt.tol = sc.tol;
  opt.jump_factor = sc.jump_factor;
  const auto rep = march(K, *pj.load, ContactState{}, sc.f, sc.m, opt);
  // closed form sampled on the march grid, affine between samples
  const auto& times = rep.trajectory.times();
  std::vector<ContactState> exact;
  double sup = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    exact.push_back(paper_jump_state(K, sc.R, sc.f, times[i]));
    sup = std::max(sup, (exact.back().u - rep.trajectory.states()[i].u).norm());
  }
  const auto it = std::find(times.begin(), times.end(), 1.0);
  if (it != times.end() && it != times.begin()) {
    const auto i = static_cast<std::size_t>(std::distance(times.begin(), it));
    sup = std::max(sup, rep.trajectory.states()[i - 1].u.norm());  // left limit of the closed form is 0
  }
  const ContactState left = pj.trajectory.jumps().front().left;
  Trajectory closed(times, exact, {{1.0, left, paper_jump_state(K, sc.R, sc.f, 1.0)}}, Interpolation::PiecewiseAffine);
  if (!sc.out.empty()) closed.write_csv(sc.out);
  if (!sc.report.empty()) {
    auto j = rep.to_json();
    j["sup_error"] = sup;
    write_text(sc.report, j.dump(2) + "\n");
  }
  const bool one_jump = rep.jumps.size() == 1 && rep.jumps[0].time == 1.0;
  const double expected = (paper_jump_state(K, sc.R, sc.f, 1.0).u).norm();
  const bool magnitude = one_jump && std::abs(rep.jumps[0].magnitude - expected) <= 1e-6;
  const auto closed_rep = check_quasistatic(closed, *pj.load, K, sc.f, sc.tol);
  RunResult r;
  r.exit_code = (one_jump && magnitude && sup <= 1e-6 && rep.residuals.pass && closed_rep.pass) ? kPass
                                                                                                 : kResidualFailure;
  std::string jumps;
  for (const auto& jp : rep.jumps) jumps += " s=" + fmt17(jp.time) + " |du|=" + fmt6(jp.magnitude);
  r.summary = "jumps " + std::to_string(rep.jumps.size()) + ":" + jumps + ", sup error " + fmt6(sup) +
              ", max residual " + residual_text(rep.residuals) + ", stability constant " + fmt6(rep.stability_constant);
  return r;
}

RunResult run_fem_march(const Scenario& sc) {
  if (!sc.mesh) config_error("mesh", "fem-march needs a mesh or mesh_file");
  if (!sc.load) config_error("load", "fem-march needs a load path");
  if (sc.load->dimension() != 4) config_error("load", "fem-march loads are (b_x, b_y, T_x, T_y)");
  FemModel model(*sc.mesh, sc.material, sc.mode);
  FemMarchOptions opt;
  opt.tol = sc.has_tol ? sc.tol : 1e-8;
  opt.jump_factor = sc.jump_factor;
  const auto rep = march_fem(model, *sc.load, VecX(), sc.f, sc.m, opt);
  if (!sc.out.empty()) {
    std::ofstream os(sc.out);
    if (!os) throw Error(ErrorCode::ConfigError, "cannot write " + sc.out);
    rep.write_csv(os, model);
  }
  RunResult r;
  r.exit_code = rep.residuals.pass ? kPass : kResidualFailure;
  r.summary = "jumps " + std::to_string(rep.jumps.size()) + ", max residual " + residual_text(rep.residuals) +
              ", stability constant " + fmt6(rep.stability_constant) + ", load mapping " + to_string(sc.mode);
  return r;
}

}  // namespace

RunResult run_scenario(const Scenario& sc) {
  spdlog::debug("running scenario kind '{}'", sc.kind);
  if (sc.kind == "critical") return run_critical(sc);
  if (sc.kind == "incremental") return run_incremental(sc);
  if (sc.kind == "continuum-family") return run_continuum(sc);
  if (sc.kind == "march") return run_march(sc);
  if (sc.kind == "paper-jump") return run_paper_jump(sc);
  if (sc.kind == "fem-march") return run_fem_march(sc);
  config_error("kind", "unknown kind '" + sc.kind +
                           "' (incremental, march, fem-march, paper-jump, continuum-family, critical)");
}

RunResult verify_trajectory(const std::string& traj_path, const Scenario& sc, double tol) {
  const auto K = sc.stiffness();
  std::shared_ptr<const LoadHistory> load;
  if (sc.kind == "paper-jump") load = paper_jump_scenario(K, sc.R, sc.f).load;
  else if (sc.load) load = sc.load;
  else config_error("load", "verify needs the scenario load");
  const Trajectory traj = Trajectory::read_csv(traj_path, sc.verify_interpolation());
  ResidualReport rep;
  try {
    rep = check_quasistatic(traj, *load, K, sc.f, tol);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MismatchedHorizon) throw Error(ErrorCode::ConfigError, e.what());
    throw;
  }
  RunResult r;
  r.exit_code = rep.pass ? kPass : kResidualFailure;
  r.summary = std::string(rep.pass ? "pass" : "fail") + ": max residual " + residual_text(rep) + ", " +
              std::to_string(traj.size()) + " breakpoints, " + std::to_string(traj.jumps().size()) + " jumps";
  return r;
}

namespace {

void configure_logging() {
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("FRICTIO_LOG")) {
    const auto lvl = spdlog::level::from_str(env);
    spdlog::set_level(lvl);
  }
}

struct SweepSpec {
  std::string param;
  double lo, hi;
  int n;
};

SweepSpec parse_sweep(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos) config_error("sweep", "expected param=lo:hi:n");
  SweepSpec sw;
  sw.param = s.substr(0, eq);
  std::stringstream ss(s.substr(eq + 1));
  std::string a, b, c;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c)) {
    config_error("sweep", "expected param=lo:hi:n");
  }
  try {
    sw.lo = std::stod(a);
    sw.hi = std::stod(b);
    sw.n = std::stoi(c);
  } catch (const std::exception&) {
    config_error("sweep", "bad number in '" + s + "'");
  }
  if (sw.n < 1) config_error("sweep", "n must be >= 1");
  return sw;
}

int run_sweep(const Scenario& base, const SweepSpec& sw) {
  const auto n = static_cast<std::size_t>(sw.n);
  std::vector<RunResult> results(n);
  std::vector<double> values(n);
  for (std::size_t k = 0; k < n; ++k) values[k] = n == 1 ? sw.lo : sw.lo + (sw.hi - sw.lo) * k / (n - 1);
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < n; k += workers) {
        Scenario sc = base;
        try {
          apply_override(sc, sw.param, values[k]);
          sc.out = with_suffix(base.out, k);
          sc.report = with_suffix(base.report, k);
          results[k] = run_scenario(sc);
        } catch (const Error& e) {
          results[k] = {exit_for(e), e.what()};
        } catch (const std::exception& e) {
          results[k] = {kConfigError, e.what()};
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  int code = kPass;
  for (std::size_t k = 0; k < n; ++k) {
    std::cout << sw.param << "=" << fmt17(values[k]) << ": " << results[k].summary << " [exit " << results[k].exit_code
              << "]\n";
    code = std::max(code, results[k].exit_code);
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"frictio: quasi-static frictional contact solver"};
  app.require_subcommand(1);

  std::string kind, scenario_path, out, report, K_text, sweep, mode, interp;
  int m = -1;
  double f = -1.0, R = -1.0, tol = -1.0, jump_factor = -1.0;
  std::uint64_t seed = 0;
  bool left_continuous = false;

  auto* run = app.add_subcommand("run", "run a scenario");
  run->add_option("kind", kind, "incremental | march | fem-march | paper-jump | continuum-family | critical");
  run->add_option("--scenario", scenario_path, "scenario JSON file");
  run->add_option("--out", out, "output file");
  run->add_option("--report", report, "report JSON file");
  run->add_option("--m", m, "subdivision refinement parameter");
  run->add_option("--f", f, "friction coefficient");
  run->add_option("--K", K_text, "stiffness k_nn,k_nt,k_tt");
  run->add_option("--R", R, "load amplitude of the jump scenario");
  run->add_option("--tol", tol, "residual tolerance");
  auto* seed_opt = run->add_option("--seed", seed, "random seed");
  run->add_option("--sweep", sweep, "param=lo:hi:n parameter sweep");
  run->add_option("--mode", mode, "virtual-work | paper-formula");
  run->add_option("--jump-factor", jump_factor, "jump detection factor");
  run->add_flag("--left-continuous", left_continuous, "write the left-continuous interpolant");

  std::string traj_path, verify_scenario, verify_interp;
  double verify_tol = 1e-9;
  auto* verify = app.add_subcommand("verify", "check a trajectory against a scenario");
  verify->add_option("trajectory", traj_path, "trajectory CSV")->required();
  verify->add_option("scenario", verify_scenario, "scenario JSON")->required();
  verify->add_option("--tol", verify_tol, "residual tolerance");
  verify->add_option("--interpolation", verify_interp, "piecewise-constant | piecewise-affine");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  try {
    if (*verify) {
      Scenario sc = load_scenario(verify_scenario);
      if (!verify_interp.empty()) sc.interpolation = interpolation_from_string(verify_interp);
      const auto r = verify_trajectory(traj_path, sc, verify_tol);
      std::cout << r.summary << "\n";
      return r.exit_code;
    }
    Scenario sc;
    if (!scenario_path.empty()) sc = load_scenario(scenario_path);
    if (!kind.empty()) sc.kind = kind;
    if (sc.kind.empty()) config_error("kind", "no scenario kind given");
    if (sc.kind == "paper-jump") {
      if (!sc.K) sc.K = std::array<double, 3>{2.0, 1.0, 2.0};
      if (!sc.has_f) {
        sc.f = 2.0;
        sc.has_f = true;
      }
      if (!sc.has_m) sc.m = 2000;
    }
    if (!K_text.empty()) sc.K = parse_K(K_text);
    if (f >= 0.0) {
      sc.f = f;
      sc.has_f = true;
    }
    if (R > 0.0) sc.R = R;
    if (m >= 0) {
      sc.m = m;
      sc.has_m = true;
    }
    if (tol > 0.0) {
      sc.tol = tol;
      sc.has_tol = true;
    }
    if (jump_factor > 0.0) sc.jump_factor = jump_factor;
    if (seed_opt->count()) sc.seed = seed;
    if (!out.empty()) sc.out = out;
    if (!report.empty()) sc.report = report;
    if (!mode.empty()) sc.mode = load_mapping_from_string(mode);
    if (!interp.empty()) sc.interpolation = interpolation_from_string(interp);
    if (left_continuous) sc.left_continuous = true;
    if (!sweep.empty()) return run_sweep(sc, parse_sweep(sweep));
    const auto r = run_scenario(sc);
    std::cout << r.summary << "\n";
    return r.exit_code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace frictio::cli
