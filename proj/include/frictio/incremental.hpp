#pragma once

#include "frictio/core.hpp"
#include "frictio/residuals.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace frictio {

struct TrescaProblem {
  StiffnessMatrix2 K;
  Vec2 F = Vec2::Zero();
  double w_t = 0.0;
  double sigma = 0.0;  // may be +inf (pure stick)
};

enum class Regime { Separated, Stick, SlipPositive, SlipNegative };
const char* to_string(Regime r);

// Minimizer of 1/2 v.Kv - F.v + sigma |v_t - w_t| over v_n <= gap, in any
// frame (K need not have k_nt >= 0). Returns u and t = K u - F.
ContactState tresca_kernel(const Mat2& K, const Vec2& F, double w_t, double sigma,
                           double gap = 0.0, Regime* regime = nullptr);

ContactState tresca_minimize(const TrescaProblem& p);

double tresca_objective(const TrescaProblem& p, const Vec2& v);

double sigma_upper_bound(const StiffnessMatrix2& K, const Vec2& F, double w_t,
                         FrictionCoefficient f);

double pressure_map(const TrescaProblem& p, FrictionCoefficient f);

// Every solution of the Coulomb incremental problem. Isolated solutions are
// listed in `points`; on the critical manifold a whole segment of contact
// slip solutions may exist and is returned as [segment_from, segment_to].
struct SolutionSet {
  std::vector<ContactState> points;
  std::optional<std::pair<ContactState, ContactState>> segment;

  bool empty() const { return points.empty() && !segment; }
  bool singleton() const { return !segment && points.size() == 1; }
  // member nearest to u (Euclidean in displacement)
  ContactState nearest(const Vec2& u) const;
};

SolutionSet incremental_solution_set(const StiffnessMatrix2& K, const Vec2& F, double w_t,
                                     FrictionCoefficient f);

struct Selection {
  enum class Kind { SmallestPressure, LargestPressure, NearestTo };
  Kind kind = Kind::SmallestPressure;
  Vec2 target = Vec2::Zero();

  static Selection smallest() { return {}; }
  static Selection largest() { return {Kind::LargestPressure, Vec2::Zero()}; }
  static Selection nearest(const Vec2& u) { return {Kind::NearestTo, u}; }
};

struct IncrementalSolution {
  ContactState state;
  Regime regime = Regime::Stick;
  int iterations = 0;
  bool unique = true;
  double sigma = 0.0;
};

struct IncrementalOptions {
  double tol = 1e-10;
  int max_iters = 10000;
  int scan_points = 1024;
};

IncrementalSolution solve_incremental(const StiffnessMatrix2& K, const Vec2& F, double w_t,
                                      FrictionCoefficient f, Selection sel = {},
                                      const IncrementalOptions& opt = {});

Regime classify(const ContactState& s, double w_t, double tol);

struct ContinuumFamily {
  Vec2 F;
  double t_n_min = 0.0;
  double t_n_max = 0.0;
  StiffnessMatrix2 K;
  double f = 0.0;

  ContactState state(double t_n) const;
};

ContinuumFamily continuum_family(const StiffnessMatrix2& K, FrictionCoefficient f, double F_t);

// max |u(F1) - u(F2)| / |F1 - F2| over random force pairs with w_t = 0
double lipschitz_probe(const StiffnessMatrix2& K, FrictionCoefficient f, int trials,
                       std::uint64_t seed);

}  // namespace frictio
