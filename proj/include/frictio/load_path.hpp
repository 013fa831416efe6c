#pragma once

#include "frictio/core.hpp"

#include <json.hpp>

#include <functional>
#include <memory>
#include <vector>

namespace frictio {

using VecX = Eigen::VectorXd;

// A right-continuous force history of bounded variation on [0, S].
class LoadHistory {
 public:
  virtual ~LoadHistory() = default;

  virtual double horizon() const = 0;
  virtual int dimension() const = 0;
  virtual VecX value(double s) const = 0;
  // limit from the left; equals value(s) away from jumps, value(0) at s = 0
  virtual VecX left_value(double s) const = 0;
  // variation over [s1, s2], with a jump at s2 included and one at s1 excluded
  virtual double variation(double s1, double s2) const = 0;
  // segment end points and jump times in [0, S], increasing
  virtual std::vector<double> breakpoints() const = 0;
  virtual std::vector<double> jump_times() const = 0;
  // norm used for force increments
  virtual double norm(const VecX& v) const = 0;

  // inf{ s > after : v(s) > level }, or S when v stays below the level
  virtual double level_crossing(double after, double level) const;

  double total_variation() const { return variation(0.0, horizon()); }
};

// Piecewise-affine path with explicit jumps. Optional blocks split the force
// vector into groups whose Euclidean norms are summed, so the variation of
// (F, T) is var(F) + var(T).
class LoadPath : public LoadHistory {
 public:
  struct Segment {
    double t0, t1;
    VecX f0, f1;
  };
  struct Jump {
    double t;
    VecX left, right;
  };

  LoadPath(double horizon, std::vector<Segment> segments, std::vector<Jump> jumps = {},
           std::vector<int> blocks = {});

  // Continuous path through (times[k], values[k]) with linear pieces.
  static LoadPath polyline(const std::vector<double>& times, const std::vector<VecX>& values,
                           std::vector<int> blocks = {});
  static LoadPath constant(double horizon, const VecX& value, std::vector<int> blocks = {});
  static LoadPath zero(double horizon, int dim) { return constant(horizon, VecX::Zero(dim)); }

  double horizon() const override { return horizon_; }
  int dimension() const override { return dim_; }
  VecX value(double s) const override;
  VecX left_value(double s) const override;
  double variation(double s1, double s2) const override;
  std::vector<double> breakpoints() const override;
  std::vector<double> jump_times() const override;
  double norm(const VecX& v) const override;
  double level_crossing(double after, double level) const override;

  const std::vector<Segment>& segments() const { return segments_; }
  const std::vector<Jump>& jumps() const { return jumps_; }
  const std::vector<int>& blocks() const { return blocks_; }

  // componentwise affine image A F + b of the path (blocks reset to one block)
  LoadPath mapped(const Eigen::MatrixXd& A, const VecX& b, std::vector<int> blocks = {}) const;

  nlohmann::json to_json() const;
  static LoadPath from_json(const nlohmann::json& j);
  std::string dump() const;

 private:
  std::size_t segment_index(double s) const;
  const Jump* jump_at(double s) const;

  double horizon_;
  int dim_;
  std::vector<Segment> segments_;
  std::vector<Jump> jumps_;
  std::vector<int> blocks_;
};

// Monotone change of time tau = forward(s) on [0, S] onto [0, S'].
struct Reparametrization {
  std::function<double(double)> forward;
  std::function<double(double)> inverse;

  static Reparametrization identity();
  static Reparametrization power(double p);   // s -> s^p, p > 0
  static Reparametrization scale(double c);   // s -> c s, c > 0
};

// The load G(tau) = F(inverse(tau)) on [0, forward(S)].
class ReparametrizedLoad : public LoadHistory {
 public:
  ReparametrizedLoad(std::shared_ptr<const LoadHistory> base, Reparametrization reparam);

  double horizon() const override { return horizon_; }
  int dimension() const override { return base_->dimension(); }
  VecX value(double tau) const override { return base_->value(back(tau)); }
  VecX left_value(double tau) const override { return base_->left_value(back(tau)); }
  double variation(double a, double b) const override {
    return base_->variation(back(a), back(b));
  }
  std::vector<double> breakpoints() const override;
  std::vector<double> jump_times() const override;
  double norm(const VecX& v) const override { return base_->norm(v); }
  double level_crossing(double after, double level) const override;

 private:
  double back(double tau) const;

  std::shared_ptr<const LoadHistory> base_;
  Reparametrization reparam_;
  double horizon_;
};

inline double variation(const LoadHistory& load, double s1, double s2) {
  return load.variation(s1, s2);
}

inline Vec2 as_vec2(const VecX& v) { return Vec2(v(0), v(1)); }

}  // namespace frictio
