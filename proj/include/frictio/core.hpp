#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace frictio {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

enum class ErrorCode {
  InvalidArgument,
  OutOfRange,
  MismatchedHorizon,
  NonConvergence,
  NotCritical,
  NonPositiveLoad,
  SupercriticalFriction,
  SubcriticalFriction,
  InadmissibleInitialCondition,
  NonMonotoneReparam,
  DegenerateTriangle,
  SingularSystem,
  InfeasibleGrid,
  ConfigError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Symmetric positive-definite stiffness in (normal, tangential) coordinates.
// Stored in canonical orientation k_nt >= 0; a negative coupling is absorbed
// by flipping the tangential axis, and flipped() reports it.
class StiffnessMatrix2 {
 public:
  StiffnessMatrix2(double k_nn, double k_nt, double k_tt);
  static StiffnessMatrix2 from_matrix(const Mat2& K);

  double k_nn() const { return k_nn_; }
  double k_nt() const { return k_nt_; }
  double k_tt() const { return k_tt_; }
  bool flipped() const { return flipped_; }
  double det() const { return k_nn_ * k_tt_ - k_nt_ * k_nt_; }

  // canonical matrix
  Mat2 matrix() const;
  // matrix in the caller's original frame
  Mat2 original_matrix() const;
  Mat2 inverse() const;

  // map a vector between the original frame and the canonical one (involution)
  Vec2 to_canonical(const Vec2& v) const { return flipped_ ? Vec2(v(0), -v(1)) : v; }
  Vec2 from_canonical(const Vec2& v) const { return to_canonical(v); }
  double tangential_to_canonical(double w) const { return flipped_ ? -w : w; }

  double max_abs_row_sum() const;
  double max_diagonal() const { return std::max(k_nn_, k_tt_); }
  double min_eigenvalue() const;

  StiffnessMatrix2 scaled(double alpha) const;

 private:
  double k_nn_, k_nt_, k_tt_;
  bool flipped_ = false;
};

class FrictionCoefficient {
 public:
  FrictionCoefficient(double f);  // NOLINT(google-explicit-constructor)
  double value() const { return f_; }
  operator double() const { return f_; }  // NOLINT(google-explicit-constructor)

 private:
  double f_;
};

struct ContactState {
  Vec2 u = Vec2::Zero();  // (u_n, u_t)
  Vec2 t = Vec2::Zero();  // (t_n, t_t)

  double u_n() const { return u(0); }
  double u_t() const { return u(1); }
  double t_n() const { return t(0); }
  double t_t() const { return t(1); }
};

inline ContactState flip_tangential(const ContactState& s) {
  return {Vec2(s.u(0), -s.u(1)), Vec2(s.t(0), -s.t(1))};
}

inline double pos_part(double x) { return x > 0.0 ? x : 0.0; }
inline double neg_part(double x) { return x < 0.0 ? -x : 0.0; }

inline double inf_norm(const Vec2& v) { return v.cwiseAbs().maxCoeff(); }

// Critical friction coefficient k_tt/k_nt; empty when k_nt = 0.
std::optional<double> critical_friction(const StiffnessMatrix2& K);

// true when f k_nt - k_tt vanishes to relative 1e-12
bool is_critical(const StiffnessMatrix2& K, double f, double rel_tol = 1e-12);

}  // namespace frictio
