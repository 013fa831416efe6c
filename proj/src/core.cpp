#include "frictio/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace frictio {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::MismatchedHorizon: return "MismatchedHorizon";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::NotCritical: return "NotCritical";
    case ErrorCode::NonPositiveLoad: return "NonPositiveLoad";
    case ErrorCode::SupercriticalFriction: return "SupercriticalFriction";
    case ErrorCode::SubcriticalFriction: return "SubcriticalFriction";
    case ErrorCode::InadmissibleInitialCondition: return "InadmissibleInitialCondition";
    case ErrorCode::NonMonotoneReparam: return "NonMonotoneReparam";
    case ErrorCode::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::InfeasibleGrid: return "InfeasibleGrid";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

StiffnessMatrix2::StiffnessMatrix2(double k_nn, double k_nt, double k_tt)
    : k_nn_(k_nn), k_nt_(k_nt), k_tt_(k_tt) {
  if (!std::isfinite(k_nn) || !std::isfinite(k_nt) || !std::isfinite(k_tt)) {
    throw Error(ErrorCode::InvalidArgument, "stiffness entries must be finite");
  }
  if (k_nn <= 0.0 || k_tt <= 0.0 || k_nn * k_tt - k_nt * k_nt <= 0.0) {
    std::ostringstream os;
    os << "stiffness [[" << k_nn << ", " << k_nt << "], [" << k_nt << ", " << k_tt
       << "]] is not positive definite";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  if (k_nt < 0.0) {
    k_nt_ = -k_nt;
    flipped_ = true;
  }
}

StiffnessMatrix2 StiffnessMatrix2::from_matrix(const Mat2& K) {
  if (std::abs(K(0, 1) - K(1, 0)) > 1e-12 * std::max(1.0, K.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::InvalidArgument, "stiffness matrix must be symmetric");
  }
  return StiffnessMatrix2(K(0, 0), 0.5 * (K(0, 1) + K(1, 0)), K(1, 1));
}

Mat2 StiffnessMatrix2::matrix() const {
  Mat2 K;
  K << k_nn_, k_nt_, k_nt_, k_tt_;
  return K;
}

Mat2 StiffnessMatrix2::original_matrix() const {
  const double c = flipped_ ? -k_nt_ : k_nt_;
  Mat2 K;
  K << k_nn_, c, c, k_tt_;
  return K;
}

Mat2 StiffnessMatrix2::inverse() const {
  const double d = det();
  Mat2 Ki;
  Ki << k_tt_ / d, -k_nt_ / d, -k_nt_ / d, k_nn_ / d;
  return Ki;
}

double StiffnessMatrix2::max_abs_row_sum() const {
  return std::max(k_nn_ + k_nt_, k_nt_ + k_tt_);
}

double StiffnessMatrix2::min_eigenvalue() const {
  const double m = 0.5 * (k_nn_ + k_tt_);
  const double r = std::hypot(0.5 * (k_nn_ - k_tt_), k_nt_);
  // det / lambda_max avoids cancellation when the matrix is ill-conditioned
  return det() / (m + r);
}

StiffnessMatrix2 StiffnessMatrix2::scaled(double alpha) const {
  return StiffnessMatrix2(alpha * k_nn_, alpha * (flipped_ ? -k_nt_ : k_nt_), alpha * k_tt_);
}

FrictionCoefficient::FrictionCoefficient(double f) : f_(f) {
  if (!std::isfinite(f) || f < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "friction coefficient must be finite and >= 0");
  }
}

std::optional<double> critical_friction(const StiffnessMatrix2& K) {
  if (K.k_nt() == 0.0) return std::nullopt;
  return K.k_tt() / K.k_nt();
}

bool is_critical(const StiffnessMatrix2& K, double f, double rel_tol) {
  if (K.k_nt() == 0.0) return false;
  return std::abs(f * K.k_nt() - K.k_tt()) <= rel_tol * K.k_tt();
}

}  // namespace frictio
