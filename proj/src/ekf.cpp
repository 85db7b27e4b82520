#include "beliefroute/ekf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace beliefroute {
namespace {

template <typename Matrix>
void require_symmetric_psd(const Matrix& m, const char* name) {
  if (!m.allFinite() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ValidationError(ErrorCategory::kConfig,
                          std::string("noise: ") + name + " must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.eigenvalues().minCoeff() < -1e-12) {
    throw ValidationError(ErrorCategory::kConfig,
                          std::string("noise: ") + name +
                              " must be positive semidefinite");
  }
}

}  // namespace

BeliefState initial_belief(const Vec3& position) {
  BeliefState b;
  b.set_position(position);
  return b;
}

double GammaModel::gamma(double range) const {
  if (kind == Kind::kConstant) return constant;
  const double ratio = range / reference_range;
  return std::clamp(ratio * ratio, 1.0, max_gamma);
}

Covariance NoiseConfig::default_process_noise() {
  Covariance q = Covariance::Zero();
  q.diagonal() << 0.01, 0.01, 0.01, 1.0, 1.0, 1.0;
  return q;
}

void NoiseConfig::validate() const {
  require_symmetric_psd(Q, "Q");
  require_symmetric_psd(R_cam, "R_cam");
  require_symmetric_psd(R_lidar, "R_lidar");
  if (!(r_alt >= 0.0) || !(r_uwb >= 0.0)) {
    throw ValidationError(ErrorCategory::kConfig,
                          "noise: scalar variances must be >= 0");
  }
  if (!(ts > 0.0)) {
    throw ValidationError(ErrorCategory::kConfig, "noise: ts must be > 0");
  }
  if (gamma_model.kind == GammaModel::Kind::kConstant
          ? !(gamma_model.constant >= 1.0)
          : !(gamma_model.reference_range > 0.0 &&
              gamma_model.max_gamma >= 1.0)) {
    throw ValidationError(ErrorCategory::kConfig,
                          "noise: invalid LIDAR gamma model");
  }
}

BeliefState predict(const BeliefState& b, const NoiseConfig& cfg) {
  Covariance phi = Covariance::Identity();
  phi.block<3, 3>(3, 0) = cfg.ts * Matrix3::Identity();
  BeliefState out;
  out.x_hat = phi * b.x_hat;
  out.P = phi * b.P * phi.transpose() + cfg.Q;
  out.P = 0.5 * (out.P + out.P.transpose()).eval();
  out.t = b.t + cfg.ts;
  return out;
}

namespace detail {

void check_innovation(const Eigen::Ref<const Eigen::MatrixXd>& S) {
  if (!S.allFinite()) {
    throw SingularInnovationError("ekf: innovation covariance is not finite");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S,
                                                     Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxInnovationCondition) {
    throw SingularInnovationError(
        "ekf: innovation covariance is singular (eigenvalues " +
        std::to_string(lo) + " .. " + std::to_string(hi) + ")");
  }
}

}  // namespace detail

double camera_elevation(const Vec3& r) {
  return std::atan2(-r.z(), std::hypot(r.x(), r.y()));
}

MeasurementModel<1> altimeter_model(const StateVector& x, const Attitude& att,
                                    double r_alt) {
  const double c = std::cos(att.pitch) * std::cos(att.roll);
  if (!(c > kMinAttitudeCosine)) {
    throw AttitudeSingularityError(
        "ekf: altimeter undefined at this attitude (cos pitch * cos roll = " +
        std::to_string(c) + ")");
  }
  MeasurementModel<1> m;
  m.predicted(0) = -x(5) / c;
  m.H.setZero();
  m.H(0, 5) = -1.0 / c;
  m.R(0, 0) = r_alt;
  return m;
}

MeasurementModel<1> uwb_model(const StateVector& x, double r_uwb) {
  const Vec3 r = x.tail<3>();
  const double d = r.norm();
  if (!(d > kMinRange)) {
    throw NearOriginSingularityError("ekf: UWB range undefined near the UGV");
  }
  MeasurementModel<1> m;
  m.predicted(0) = d;
  m.H.setZero();
  m.H.block<1, 3>(0, 3) = (r / d).transpose();
  m.R(0, 0) = r_uwb;
  return m;
}

MeasurementModel<3> camera_model(const StateVector& x, const Matrix3& R_cam) {
  const Vec3 r = x.tail<3>();
  const double d = r.norm();
  if (!(d > kMinRange)) {
    throw NearOriginSingularityError(
        "ekf: camera bearing undefined near the UGV");
  }
  const double sin_elev = -r.z() / d;
  if (!(std::abs(sin_elev) > kMinSinElevation)) {
    throw HorizonSingularityError(
        "ekf: camera bearing too close to the horizon (sin elevation = " +
        std::to_string(sin_elev) + ")");
  }
  const Vec3 u = r / d;
  MeasurementModel<3> m;
  m.predicted = u;
  m.H.setZero();
  // d(r/|r|)/dr = (I - u u^T) / |r|
  m.H.block<3, 3>(0, 3) = (Matrix3::Identity() - u * u.transpose()) / d;
  m.R = R_cam / std::abs(sin_elev);
  return m;
}

MeasurementModel<3> lidar_model(const StateVector& x, const Matrix3& R_lidar,
                                double gamma) {
  if (!(gamma >= 1.0)) {
    throw ValidationError(ErrorCategory::kEstimation,
                          "ekf: LIDAR gamma must be >= 1");
  }
  MeasurementModel<3> m;
  m.predicted = x.tail<3>();
  m.H.setZero();
  m.H.block<3, 3>(0, 3) = Matrix3::Identity();
  m.R = gamma * R_lidar;
  return m;
}

BeliefState altimeter_update(const BeliefState& b, double z,
                             const Attitude& att, const NoiseConfig& cfg) {
  const auto m = altimeter_model(b.x_hat, att, cfg.r_alt);
  MeasurementVector<1> innovation;
  innovation(0) = z - m.predicted(0);
  return joseph_update<1>(b, m.H, m.R, innovation);
}

BeliefState uwb_update(const BeliefState& b, double z, const NoiseConfig& cfg) {
  const auto m = uwb_model(b.x_hat, cfg.r_uwb);
  MeasurementVector<1> innovation;
  innovation(0) = z - m.predicted(0);
  return joseph_update<1>(b, m.H, m.R, innovation);
}

BeliefState camera_update(const BeliefState& b, const Vec3& z,
                          const NoiseConfig& cfg) {
  const auto m = camera_model(b.x_hat, cfg.R_cam);
  return joseph_update<3>(b, m.H, m.R, z - m.predicted);
}

BeliefState lidar_update(const BeliefState& b, const Vec3& z, double gamma,
                         const NoiseConfig& cfg) {
  const auto m = lidar_model(b.x_hat, cfg.R_lidar, gamma);
  return joseph_update<3>(b, m.H, m.R, z - m.predicted);
}

}  // namespace beliefroute
