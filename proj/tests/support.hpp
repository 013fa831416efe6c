#pragma once

#include "frictio/core.hpp"
#include "frictio/load_path.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace frictio::testkit {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// SPD stiffness with k_nt >= 0 when nonneg_coupling, else either sign
inline StiffnessMatrix2 random_stiffness(Rng& rng, bool nonneg_coupling = true) {
  const double k_nn = uniform(rng, 0.5, 5.0);
  const double k_tt = uniform(rng, 0.5, 5.0);
  const double bound = 0.95 * std::sqrt(k_nn * k_tt);
  const double k_nt = nonneg_coupling ? uniform(rng, 0.0, bound) : uniform(rng, -bound, bound);
  return StiffnessMatrix2(k_nn, k_nt, k_tt);
}

inline Vec2 random_vec(Rng& rng, double amp) { return Vec2(uniform(rng, -amp, amp), uniform(rng, -amp, amp)); }

// continuous polyline on [0, S] starting at zero
inline LoadPath random_lipschitz_load(Rng& rng, int knots, double S = 1.0, double amp = 1.0) {
  std::vector<double> times{0.0};
  std::vector<VecX> values{VecX::Zero(2)};
  for (int k = 1; k <= knots; ++k) {
    times.push_back(k == knots ? S : S * k / knots);
    values.push_back(random_vec(rng, amp));
  }
  return LoadPath::polyline(times, values);
}

// piecewise-affine path with jumps at some interior knots and possibly at S
inline LoadPath random_bv_load(Rng& rng, int knots, double S = 1.0, double amp = 1.0) {
  std::vector<double> times;
  for (int k = 0; k <= knots; ++k) times.push_back(k == knots ? S : S * k / knots);
  std::vector<LoadPath::Segment> segs;
  std::vector<LoadPath::Jump> jumps;
  VecX start = VecX::Zero(2);
  for (int k = 0; k < knots; ++k) {
    VecX end = random_vec(rng, amp);
    segs.push_back({times[k], times[k + 1], start, end});
    start = end;
    if (uniform(rng, 0.0, 1.0) < 0.4) {
      VecX right = random_vec(rng, amp);
      jumps.push_back({times[k + 1], end, right});
      start = right;
    }
  }
  return LoadPath(S, segs, jumps);
}

}  // namespace frictio::testkit
