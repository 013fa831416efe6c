#include "frictio/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace frictio::oracle {

namespace {

// Neumaier compensated sum
struct CompensatedSum {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) comp += (sum - t) + x;
    else comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace

void GridSpec::validate() const {
  if (points < 3 || points % 2 == 0) throw Error(ErrorCode::InvalidArgument, "grid needs an odd count >= 3");
  if (center.size() != half_width.size() || center.size() == 0) {
    throw Error(ErrorCode::InvalidArgument, "grid center and half widths must match");
  }
  if ((half_width.array() <= 0.0).any()) throw Error(ErrorCode::InvalidArgument, "half widths must be positive");
  if (levels < 1 || !(shrink > 1.0)) throw Error(ErrorCode::InvalidArgument, "bad refinement settings");
}

double ConvexObjective::operator()(const VecX& v) const {
  CompensatedSum s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    for (Eigen::Index j = 0; j < v.size(); ++j) s.add(0.5 * v(i) * K(i, j) * v(j));
    s.add(-F(i) * v(i));
  }
  for (const auto& a : abs_terms) s.add(a.weight * std::abs(v(a.index) - a.center));
  return s.value();
}

BruteResult brute_minimize(const ConvexObjective& obj, const VecX& upper, const GridSpec& grid) {
  grid.validate();
  const auto d = grid.center.size();
  if (obj.K.rows() != d || obj.F.size() != d || upper.size() != d) {
    throw Error(ErrorCode::InvalidArgument, "objective and grid dimensions differ");
  }
  std::vector<int> abs_of(static_cast<std::size_t>(d), -1);
  for (std::size_t k = 0; k < obj.abs_terms.size(); ++k) {
    const int i = obj.abs_terms[k].index;
    if (i < 0 || i >= d || abs_of[i] >= 0) {
      throw Error(ErrorCode::InvalidArgument, "at most one |.| term per coordinate");
    }
    abs_of[i] = static_cast<int>(k);
  }

  BruteResult res{VecX(), std::numeric_limits<double>::infinity(), 0};
  VecX center = grid.center;
  VecX hw = grid.half_width;
  const int p = grid.points;
  for (int level = 0; level < grid.levels; ++level) {
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    bool found = false;
    VecX best_here;
    double best_val = std::numeric_limits<double>::infinity();
    while (true) {
      VecX x(d);
      for (Eigen::Index i = 0; i < d; ++i) x(i) = center(i) + hw(i) * (2.0 * idx[i] / (p - 1) - 1.0);
      if ((x.array() <= upper.array()).all()) {
        const double v = obj(x);
        ++res.evaluations;
        if (v < best_val) {
          best_val = v;
          best_here = x;
          found = true;
        }
      }
      Eigen::Index k = 0;
      while (k < d && ++idx[k] == p) idx[k++] = 0;
      if (k == d) break;
    }
    if (!found) {
      if (level == 0) throw Error(ErrorCode::InfeasibleGrid, "no grid point satisfies the bounds");
      break;
    }
    if (best_val < res.value) {
      res.value = best_val;
      res.x = best_here;
    }
    center = res.x;
    hw /= grid.shrink;
  }

  // proximal gradient polish with finite-difference gradients of the
  // quadratic part and restarted momentum
  auto smooth = [&](const VecX& x) {
    CompensatedSum s;
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) s.add(0.5 * x(i) * obj.K(i, j) * x(j));
      s.add(-obj.F(i) * x(i));
    }
    return s.value();
  };
  auto grad = [&](const VecX& x) {
    VecX g(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const double h = 1e-3 * std::max(1.0, std::abs(x(i)));
      VecX a = x, b = x;
      a(i) += h;
      b(i) -= h;
      g(i) = (smooth(a) - smooth(b)) / (2.0 * h);
    }
    return g;
  };
  const double L = std::max(obj.K.norm(), 1e-300);
  const double step = 1.0 / L;
  auto prox = [&](const VecX& y) {
    VecX z = y;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (abs_of[i] >= 0) {
        const auto& a = obj.abs_terms[abs_of[i]];
        const double r = z(i) - a.center;
        const double shrink = step * a.weight;
        z(i) = a.center + (r > shrink ? r - shrink : (r < -shrink ? r + shrink : 0.0));
      }
      z(i) = std::min(z(i), upper(i));
    }
    return z;
  };
  VecX x = res.x, y = x;
  double tk = 1.0;
  double fx = obj(x);
  for (int it = 0; it < 200000; ++it) {
    const VecX xn = prox(y - step * grad(y));
    const double fn = obj(xn);
    if (fn > fx) {
      // restart momentum from the current iterate
      y = x;
      tk = 1.0;
      const VecX xs = prox(x - step * grad(x));
      const double fs = obj(xs);
      if (fs > fx || (xs - x).cwiseAbs().maxCoeff() <= 1e-15 * std::max(1.0, x.cwiseAbs().maxCoeff())) break;
      x = xs;
      fx = fs;
      continue;
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    const VecX dx = xn - x;
    y = xn + ((tk - 1.0) / tn) * dx;
    tk = tn;
    x = xn;
    fx = fn;
    if (dx.cwiseAbs().maxCoeff() <= 1e-15 * std::max(1.0, x.cwiseAbs().maxCoeff())) break;
  }
  // plain proximal steps; near the minimizer objective differences drown in
  // rounding, so only the step length decides
  for (int it = 0; it < 1000000; ++it) {
    const VecX xn = prox(x - step * grad(x));
    const double dx = (xn - x).cwiseAbs().maxCoeff();
    x = xn;
    if (dx <= 1e-13 * std::max(1.0, x.cwiseAbs().maxCoeff())) break;
  }
  fx = obj(x);
  if (fx <= res.value) {
    res.x = x;
    res.value = fx;
  }
  return res;
}

double quadrature_energy(const Point& A, const Point& B, const Point& C, const ElasticMaterial& mat,
                         const Vec2& uA) {
  Eigen::Matrix3d M;
  M << 1.0, A(0), A(1), 1.0, B(0), B(1), 1.0, C(0), C(1);
  const double det = M.determinant();
  const double diam2 = std::max({(B - A).squaredNorm(), (C - B).squaredNorm(), (A - C).squaredNorm()});
  if (!(std::abs(det) > 2e-14 * diam2)) throw Error(ErrorCode::DegenerateTriangle, "triangle has zero area");
  // phi_A = a + b x + c y with phi_A(A) = 1, phi_A(B) = phi_A(C) = 0
  const Eigen::Vector3d coef = M.partialPivLu().solve(Eigen::Vector3d(1.0, 0.0, 0.0));
  const double gx = coef(1), gy = coef(2);
  // strain of u = phi_A uA
  const double exx = uA(0) * gx;
  const double eyy = uA(1) * gy;
  const double exy = 0.5 * (uA(0) * gy + uA(1) * gx);
  const double mu = mat.E / (2.0 * (1.0 + mat.nu));
  double lambda = mat.E * mat.nu / ((1.0 + mat.nu) * (1.0 - 2.0 * mat.nu));
  if (mat.formulation == Formulation::PlaneStress) lambda = 2.0 * lambda * mu / (lambda + 2.0 * mu);
  const double tr = exx + eyy;
  const double sxx = lambda * tr + 2.0 * mu * exx;
  const double syy = lambda * tr + 2.0 * mu * eyy;
  const double sxy = 2.0 * mu * exy;
  const double density = 0.5 * (sxx * exx + syy * eyy + 2.0 * sxy * exy);
  const double area = 0.5 * std::abs(det);
  // three-point rule at the edge midpoints, weights area/3
  CompensatedSum s;
  for (int q = 0; q < 3; ++q) s.add(area / 3.0 * density);
  return s.value();
}

VecX projected_gradient_qp(const MatX& K, const VecX& F, const VecX& upper, double tol, int max_iters) {
  const auto n = F.size();
  if (K.rows() != n || K.cols() != n || upper.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "QP dimensions differ");
  }
  Eigen::SelfAdjointEigenSolver<MatX> es(K, Eigen::EigenvaluesOnly);
  const double L = es.eigenvalues().maxCoeff();
  if (!(es.eigenvalues().minCoeff() > 0.0)) throw Error(ErrorCode::SingularSystem, "QP matrix is not SPD");
  auto project = [&](const VecX& x) { return x.cwiseMin(upper); };
  VecX x = project(VecX::Zero(n));
  VecX y = x;
  double tk = 1.0;
  for (int it = 0; it < max_iters; ++it) {
    const VecX xn = project(y - (K * y - F) / L);
    // gradient restart: drop momentum once it points uphill
    if ((y - xn).dot(xn - x) > 0.0) {
      y = x;
      tk = 1.0;
      continue;
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    const VecX dx = xn - x;
    y = xn + ((tk - 1.0) / tn) * dx;
    tk = tn;
    x = xn;
    if (dx.cwiseAbs().maxCoeff() <= tol * std::max(1.0, x.cwiseAbs().maxCoeff())) {
      // confirm with a plain projected step
      const VecX xs = project(x - (K * x - F) / L);
      if ((xs - x).cwiseAbs().maxCoeff() <= 10.0 * tol * std::max(1.0, x.cwiseAbs().maxCoeff())) break;
    }
  }
  return x;
}

double scalar_contact_minimizer(double k, double F) {
  if (!(k > 0.0)) throw Error(ErrorCode::InvalidArgument, "k must be positive");
  return std::min(F / k, 0.0);
}

double scalar_tresca(double k, double F, double w, double sigma) {
  if (!(k > 0.0) || !(sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "k > 0 and sigma >= 0 required");
  const double r = F - k * w;
  if (std::abs(r) <= sigma) return w;
  return (F - (r > 0 ? sigma : -sigma)) / k;
}

}  // namespace frictio::oracle
