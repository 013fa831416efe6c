#pragma once

#include "frictio/core.hpp"
#include "frictio/fem.hpp"
#include "frictio/load_path.hpp"
#include "frictio/trajectory.hpp"

#include <json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace frictio::cli {

enum ExitCode : int { kPass = 0, kConfigError = 1, kResidualFailure = 2, kNonConvergence = 3 };

struct Scenario {
  std::string kind;
  std::optional<std::array<double, 3>> K;  // k_nn, k_nt, k_tt
  Vec2 F = Vec2::Zero();
  double w_t = 0.0;
  double f = 0.0;
  bool has_f = false;
  double R = 1.0;
  double F_t = 1.0;
  int samples = 101;
  int m = 100;
  bool has_m = false;
  double tol = 1e-9;
  bool has_tol = false;
  std::uint64_t seed = 0;
  std::shared_ptr<LoadPath> load;
  ContactState u0;
  std::optional<PlaneMesh> mesh;
  ElasticMaterial material;
  LoadMapping mode = LoadMapping::VirtualWork;
  std::optional<Interpolation> interpolation;
  std::string out;
  std::string report;
  bool left_continuous = false;
  double jump_factor = 20.0;

  StiffnessMatrix2 stiffness() const;
  Interpolation verify_interpolation() const;
};

// Parse a scenario; relative file references resolve against base_dir.
Scenario parse_scenario(const nlohmann::json& j, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);

// Apply a "name=value" override (f, m, R, tol, seed, F_t).
void apply_override(Scenario& sc, const std::string& name, double value);

struct RunResult {
  int exit_code = kPass;
  std::string summary;
};

RunResult run_scenario(const Scenario& sc);
RunResult verify_trajectory(const std::string& traj_path, const Scenario& sc, double tol);

// Entry point of the command-line tool.
int main(int argc, char** argv);

}  // namespace frictio::cli
