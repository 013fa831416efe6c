#pragma once

#include "frictio/core.hpp"
#include "frictio/load_path.hpp"
#include "frictio/trajectory.hpp"

#include <string>

namespace frictio {

// Residuals of the contact and friction laws. Raw values carry units; the
// normalized ones are divided by scale = max(1, |F|inf, |K|inf) (lengths are
// first converted to forces with |K|inf) and are what tol is compared with.
struct ResidualReport {
  double equilibrium = 0.0;    // force
  double signorini = 0.0;      // dimensionless
  double friction_cone = 0.0;  // force
  double flow_rule = 0.0;      // force * length
  double continuity = 0.0;     // length, jump left limits vs previous state

  double equilibrium_normalized = 0.0;
  double signorini_normalized = 0.0;
  double friction_cone_normalized = 0.0;
  double flow_rule_normalized = 0.0;
  double continuity_normalized = 0.0;

  double scale = 1.0;
  double tol = 0.0;

  bool equilibrium_pass = true;
  bool signorini_pass = true;
  bool friction_cone_pass = true;
  bool flow_rule_pass = true;
  bool continuity_pass = true;
  bool pass = true;

  double max_normalized() const;
  // worst law name, "none" when all vanish
  std::string worst_law() const;
  // recompute pass flags against tol
  void evaluate(double tol);
  // componentwise maximum, flags recomputed with tol
  void merge(const ResidualReport& other);
  std::string summary() const;
};

ResidualReport check_incremental_kkt(const StiffnessMatrix2& K, const Vec2& F, double w_t,
                                     FrictionCoefficient f, const ContactState& state,
                                     double tol);

// Laws at every breakpoint against load.value, the flow rule in increment form
// paired with the end-of-increment traction, and jump consistency. For the
// piecewise-affine rule the laws are also sampled at piece midpoints.
ResidualReport check_quasistatic(const Trajectory& traj, const LoadHistory& load,
                                 const StiffnessMatrix2& K, FrictionCoefficient f, double tol);

}  // namespace frictio
