#pragma once

#include <Eigen/Dense>

#include "beliefroute/errors.hpp"
#include "beliefroute/map_env.hpp"

namespace beliefroute {

/// [v_N, v_E, v_D, r_N, r_E, r_D]
using StateVector = Eigen::Matrix<double, 6, 1>;
using Covariance = Eigen::Matrix<double, 6, 6>;
using Matrix3 = Eigen::Matrix3d;

template <int M>
using MeasurementMatrix = Eigen::Matrix<double, M, 6>;
template <int M>
using GainMatrix = Eigen::Matrix<double, 6, M>;
template <int M>
using MeasurementVector = Eigen::Matrix<double, M, 1>;
template <int M>
using MeasurementCovariance = Eigen::Matrix<double, M, M>;

struct BeliefState {
  StateVector x_hat = StateVector::Zero();
  Covariance P = Covariance::Identity();
  double t = 0.0;

  Vec3 velocity() const { return x_hat.head<3>(); }
  Vec3 position() const { return x_hat.tail<3>(); }
  void set_velocity(const Vec3& v) { x_hat.head<3>() = v; }
  void set_position(const Vec3& r) { x_hat.tail<3>() = r; }
};

/// Zero velocity at `position`, unit covariance.
BeliefState initial_belief(const Vec3& position);

struct Attitude {
  double pitch = 0.0;
  double roll = 0.0;
};

/// LIDAR noise inflation as a function of range. The number of returns on
/// the UAV falls off with the square of range, so relative to the count at
/// `reference_range` the factor is (range / reference_range)^2, clamped to
/// [1, max_gamma]. kConstant always returns `constant`.
struct GammaModel {
  enum class Kind { kInverseSquare, kConstant };
  Kind kind = Kind::kInverseSquare;
  double reference_range = 5.0;
  double max_gamma = 100.0;
  double constant = 1.0;

  double gamma(double range) const;
};

struct NoiseConfig {
  Covariance Q = default_process_noise();
  double r_alt = 0.01;
  double r_uwb = 0.01;
  Matrix3 R_cam = 1e-4 * Matrix3::Identity();
  Matrix3 R_lidar = 0.0225 * Matrix3::Identity();
  GammaModel gamma_model;
  double ts = 0.02;

  /// diag(0.01, 0.01, 0.01, 1, 1, 1)
  static Covariance default_process_noise();
  /// Throws ValidationError on asymmetric/indefinite matrices or ts <= 0.
  void validate() const;
};

// Guards against degenerate measurement geometry.
inline constexpr double kMinRange = 0.1;
inline constexpr double kMinSinElevation = 0.05;
inline constexpr double kMinAttitudeCosine = 0.01;
inline constexpr double kMaxInnovationCondition = 1e12;

/// x <- Phi x, P <- Phi P Phi^T + Q with Phi = [[I, 0], [ts I, I]].
BeliefState predict(const BeliefState& b, const NoiseConfig& cfg);

/// Predicted measurement, its Jacobian with respect to the state, and the
/// effective noise covariance at the linearization point.
template <int M>
struct MeasurementModel {
  MeasurementVector<M> predicted;
  MeasurementMatrix<M> H;
  MeasurementCovariance<M> R;
};

/// -r_D / (cos(pitch) cos(roll))
MeasurementModel<1> altimeter_model(const StateVector& x, const Attitude& att,
                                    double r_alt);
/// |r|
MeasurementModel<1> uwb_model(const StateVector& x, double r_uwb);
/// r / |r|, noise scaled by 1 / sin(elevation)
MeasurementModel<3> camera_model(const StateVector& x, const Matrix3& R_cam);
/// r, noise scaled by gamma
MeasurementModel<3> lidar_model(const StateVector& x, const Matrix3& R_lidar,
                                double gamma);

/// Elevation of r above the horizontal plane through the origin:
/// atan2(-r_D, |(r_N, r_E)|).
double camera_elevation(const Vec3& r);

namespace detail {
void check_innovation(const Eigen::Ref<const Eigen::MatrixXd>& S);
}

/// K = P H^T (H P H^T + R)^-1. Throws SingularInnovationError when the
/// innovation covariance is not positive definite or its condition number
/// exceeds kMaxInnovationCondition.
template <int M>
GainMatrix<M> kalman_gain(const Covariance& P, const MeasurementMatrix<M>& H,
                          const MeasurementCovariance<M>& R) {
  const MeasurementCovariance<M> S = H * P * H.transpose() + R;
  detail::check_innovation(S);
  // K S = P H^T; S is symmetric positive definite.
  const GainMatrix<M> PHt = P * H.transpose();
  return S.ldlt().solve(PHt.transpose()).transpose();
}

/// Joseph-form correction:
///   P <- (I - K H) P (I - K H)^T + K R K^T,  x <- x + K innovation,
/// followed by P <- (P + P^T) / 2.
template <int M>
BeliefState joseph_update(const BeliefState& b, const MeasurementMatrix<M>& H,
                          const MeasurementCovariance<M>& R,
                          const MeasurementVector<M>& innovation) {
  const GainMatrix<M> K = kalman_gain<M>(b.P, H, R);
  const Covariance IKH = Covariance::Identity() - K * H;
  BeliefState out = b;
  out.P = IKH * b.P * IKH.transpose() + K * R * K.transpose();
  out.P = 0.5 * (out.P + out.P.transpose()).eval();
  out.x_hat = b.x_hat + K * innovation;
  return out;
}

BeliefState altimeter_update(const BeliefState& b, double z,
                             const Attitude& att, const NoiseConfig& cfg);
BeliefState uwb_update(const BeliefState& b, double z, const NoiseConfig& cfg);
BeliefState camera_update(const BeliefState& b, const Vec3& z,
                          const NoiseConfig& cfg);
BeliefState lidar_update(const BeliefState& b, const Vec3& z, double gamma,
                         const NoiseConfig& cfg);

}  // namespace beliefroute
