#pragma once

#include "frictio/core.hpp"
#include "frictio/incremental.hpp"
#include "frictio/load_path.hpp"
#include "frictio/residuals.hpp"
#include "frictio/trajectory.hpp"

#include <json.hpp>

#include <memory>
#include <vector>

namespace frictio {

struct Subdivision {
  std::vector<double> times;
  int m = 0;
  std::vector<double> gains;  // v(s_i) - v(s_{i-1})
};

Subdivision build_subdivision(const LoadHistory& load, int m);

// Largest |F_+(s) - F(s)| over [0, S] for the piecewise-constant interpolant
// on the given times, evaluated at piece end points and one-sided limits.
double interpolant_error(const LoadHistory& load, const std::vector<double>& times);

struct MarchOptions {
  // increments above jump_factor * C (|dF| + v(S)/(m+1)) count as jumps, where
  // C is the compliance 1/lambda_min(K)
  double jump_factor = 20.0;
  // re-select the step before a jump so the trajectory stays right-continuous
  bool relocate_jumps = true;
  // add load kinks and jump times to the subdivision
  bool include_load_breakpoints = true;
  double tol = 1e-9;
  IncrementalOptions incremental{};
};

struct JumpInfo {
  double time;
  double magnitude;
};

struct MarchReport {
  Trajectory trajectory;
  std::vector<JumpInfo> jumps;
  double stability_constant = 0.0;  // max |du_i| / |dF_i| over steps with dF_i != 0
  std::vector<double> energy_residuals;
  std::vector<std::size_t> non_unique_steps;
  ResidualReport residuals;
  double jump_threshold_base = 0.0;

  double max_energy_residual() const;
  nlohmann::json to_json() const;
};

// the march grid: subdivision times plus (optionally) load breakpoints
std::vector<double> march_grid(const LoadHistory& load, int m, bool include_load_breakpoints);

MarchReport march(const StiffnessMatrix2& K, const LoadHistory& load, const ContactState& u0,
                  FrictionCoefficient f, int m, const MarchOptions& opt = {});

struct PaperJump {
  std::shared_ptr<LoadPath> load;
  Trajectory trajectory;
};

// Closed-form jumping solution on [0, 2] for f >= k_tt/k_nt: stuck at the
// origin on [0, 1[, a tangential jump at s = 1, traction-free motion after.
PaperJump paper_jump_scenario(const StiffnessMatrix2& K, double R, FrictionCoefficient f);

// exact state of the jumping solution at s (right limit)
ContactState paper_jump_state(const StiffnessMatrix2& K, double R, double f, double s);

// Laws for the stuck continuation u = 0 at s = 1 + epsilon; fails by design.
ResidualReport no_continuation_witness(const StiffnessMatrix2& K, double R,
                                       FrictionCoefficient f, double epsilon);

struct RateIndependenceResult {
  bool coincide = false;
  double max_difference = 0.0;
  std::size_t steps = 0;
};

RateIndependenceResult rate_independence_check(const StiffnessMatrix2& K,
                                               std::shared_ptr<const LoadHistory> load,
                                               const ContactState& u0, FrictionCoefficient f,
                                               int m, const Reparametrization& reparam,
                                               double tol = 1e-12);

bool rate_independence_probe(const StiffnessMatrix2& K, std::shared_ptr<const LoadHistory> load,
                             const ContactState& u0, FrictionCoefficient f, int m,
                             const Reparametrization& reparam);

}  // namespace frictio
