#pragma once

#include "frictio/core.hpp"
#include "frictio/fem.hpp"

#include <vector>

namespace frictio::oracle {

using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

struct GridSpec {
  VecX center;
  VecX half_width;
  int points = 41;  // per axis, odd
  int levels = 5;
  double shrink = 10.0;

  void validate() const;
};

// 1/2 v.Kv - F.v + sum_k weight_k |v_{index_k} - center_k|
struct ConvexObjective {
  struct AbsTerm {
    int index;
    double weight;
    double center;
  };
  MatX K;
  VecX F;
  std::vector<AbsTerm> abs_terms;

  double operator()(const VecX& v) const;
};

struct BruteResult {
  VecX x;
  double value;
  int evaluations;
};

// Exhaustive grid search with recentring and shrinking, then proximal
// gradient steps on finite-difference gradients. Every evaluated point
// satisfies v <= upper (use +inf for a free axis).
BruteResult brute_minimize(const ConvexObjective& obj, const VecX& upper, const GridSpec& grid);

// Elastic energy of the field vanishing at B and C and equal to uA at A.
double quadrature_energy(const Point& A, const Point& B, const Point& C,
                         const ElasticMaterial& mat, const Vec2& uA);

// min 1/2 u.Ku - F.u over u <= upper by projected gradient
VecX projected_gradient_qp(const MatX& K, const VecX& F, const VecX& upper, double tol = 1e-15,
                           int max_iters = 2000000);

// min 1/2 k u^2 - F u over u <= 0
double scalar_contact_minimizer(double k, double F);

// min 1/2 k v^2 - F v + sigma |v - w|
double scalar_tresca(double k, double F, double w, double sigma);

}  // namespace frictio::oracle
