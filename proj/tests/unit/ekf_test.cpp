#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "beliefroute/ekf.hpp"

using namespace beliefroute;

namespace {

StateVector state(const Vec3& v, const Vec3& r) {
  StateVector x;
  x << v, r;
  return x;
}

Covariance random_spd(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Covariance a;
  for (int i = 0; i < 36; ++i) a(i) = n(rng);
  return a * a.transpose() + 0.5 * Covariance::Identity();
}

// Central differences of f at x, column by column.
template <int M, typename F>
Eigen::Matrix<double, M, 6> numeric_jacobian(F f, const StateVector& x) {
  Eigen::Matrix<double, M, 6> J;
  for (int i = 0; i < 6; ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x(i)));
    StateVector xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    J.col(i) = (f(xp) - f(xm)) / (2 * h);
  }
  return J;
}

// Information-form posterior, independent of the Joseph implementation.
template <int M>
Covariance information_posterior(const Covariance& P, const MeasurementMatrix<M>& H,
                                 const MeasurementCovariance<M>& R) {
  const Covariance info = P.inverse() + H.transpose() * R.inverse() * H;
  return info.inverse();
}

bool is_psd(const Covariance& P) {
  Eigen::SelfAdjointEigenSolver<Covariance> eig(P);
  return eig.eigenvalues().minCoeff() > -1e-9;
}

}  // namespace

TEST(Predict, MatchesHandBuiltTransition) {
  NoiseConfig cfg;
  BeliefState b;
  b.x_hat << 1, -2, 0.5, 10, 20, -3;
  std::mt19937_64 rng(1);
  b.P = random_spd(rng);
  const auto out = predict(b, cfg);

  Covariance phi = Covariance::Identity();
  for (int i = 0; i < 3; ++i) phi(3 + i, i) = 0.02;
  EXPECT_TRUE(out.x_hat.isApprox(phi * b.x_hat, 1e-14));
  EXPECT_TRUE(out.P.isApprox(phi * b.P * phi.transpose() + cfg.Q, 1e-12));
  EXPECT_DOUBLE_EQ(out.x_hat(3), 10.02);
  EXPECT_DOUBLE_EQ(out.t, 0.02);
}

TEST(Predict, IdentityCovarianceExample) {
  NoiseConfig cfg;
  const auto out = predict(initial_belief(Vec3(1, 0, -1)), cfg);
  // Position block: I + ts^2 I + Q_r; cross block: ts I.
  EXPECT_NEAR(out.P(3, 3), 1.0 + 0.0004 + 1.0, 1e-15);
  EXPECT_NEAR(out.P(0, 0), 1.01, 1e-15);
  EXPECT_NEAR(out.P(3, 0), 0.02, 1e-15);
  EXPECT_NEAR(out.P(3, 4), 0.0, 1e-15);
}

TEST(MeasurementModels, UwbExampleJacobian) {
  const auto m = uwb_model(state(Vec3::Zero(), Vec3(3, 4, 0)), 0.01);
  EXPECT_DOUBLE_EQ(m.predicted(0), 5.0);
  MeasurementMatrix<1> expected;
  expected << 0, 0, 0, 0.6, 0.8, 0;
  EXPECT_TRUE(m.H.isApprox(expected, 1e-15));
}

TEST(MeasurementModels, AltimeterLevelFlight) {
  const auto m = altimeter_model(state(Vec3::Zero(), Vec3(3, 4, -2)), {}, 0.01);
  EXPECT_DOUBLE_EQ(m.predicted(0), 2.0);
  EXPECT_DOUBLE_EQ(m.H(0, 5), -1.0);
}

TEST(MeasurementModels, JacobiansMatchFiniteDifferences) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(-20, 20), vel(-2, 2), ang(-0.6, 0.6);
  const Matrix3 R = Matrix3::Identity();
  int checked = 0;
  while (checked < 100) {
    const Vec3 r(pos(rng), pos(rng), -std::abs(pos(rng)) - 0.5);
    const auto x = state(Vec3(vel(rng), vel(rng), vel(rng)), r);
    const Attitude att{ang(rng), ang(rng)};
    auto rel = [](const auto& a, const auto& b) {
      return (a - b).norm() / std::max(1e-12, b.norm());
    };

    const auto alt = altimeter_model(x, att, 0.01);
    const auto alt_fd = numeric_jacobian<1>(
        [&](const StateVector& s) { return altimeter_model(s, att, 0.01).predicted; }, x);
    EXPECT_LT(rel(alt.H, alt_fd), 1e-5);

    const auto uwb = uwb_model(x, 0.01);
    const auto uwb_fd = numeric_jacobian<1>(
        [&](const StateVector& s) { return uwb_model(s, 0.01).predicted; }, x);
    EXPECT_LT(rel(uwb.H, uwb_fd), 1e-5);

    const auto cam = camera_model(x, R);
    const auto cam_fd = numeric_jacobian<3>(
        [&](const StateVector& s) { return camera_model(s, R).predicted; }, x);
    EXPECT_LT(rel(cam.H, cam_fd), 1e-5);

    const auto lid = lidar_model(x, R, 2.0);
    const auto lid_fd = numeric_jacobian<3>(
        [&](const StateVector& s) { return lidar_model(s, R, 2.0).predicted; }, x);
    EXPECT_LT(rel(lid.H, lid_fd), 1e-5);
    ++checked;
  }
}

TEST(MeasurementModels, CameraNoiseGrowsTowardTheHorizon) {
  const Matrix3 R = 1e-4 * Matrix3::Identity();
  // sin(elevation) = 0.6
  const auto m = camera_model(state(Vec3::Zero(), Vec3(4, 0, -3)), R);
  EXPECT_TRUE(m.R.isApprox(R / 0.6, 1e-14));
  EXPECT_TRUE(m.predicted.isApprox(Vec3(0.8, 0, -0.6), 1e-15));
  EXPECT_NEAR(camera_elevation(Vec3(4, 0, -3)), std::asin(0.6), 1e-15);
}

TEST(MeasurementModels, GuardsThrow) {
  const Matrix3 R = Matrix3::Identity();
  EXPECT_THROW(uwb_model(state(Vec3::Zero(), Vec3(0.05, 0, 0)), 0.01),
               NearOriginSingularityError);
  EXPECT_THROW(camera_model(state(Vec3::Zero(), Vec3(0, 0.05, -0.05)), R),
               NearOriginSingularityError);
  EXPECT_THROW(camera_model(state(Vec3::Zero(), Vec3(10, 0, -0.1)), R),
               HorizonSingularityError);
  EXPECT_NO_THROW(camera_model(state(Vec3::Zero(), Vec3(10, 0, -1)), R));
  EXPECT_THROW(altimeter_model(state(Vec3::Zero(), Vec3(1, 1, -1)), {1.565, 0.0}, 0.01),
               AttitudeSingularityError);
  EXPECT_THROW(lidar_model(state(Vec3::Zero(), Vec3(1, 1, -1)), R, 0.5), ValidationError);
}

TEST(Gamma, InverseSquareClamped) {
  GammaModel g;
  EXPECT_DOUBLE_EQ(g.gamma(2.5), 1.0);
  EXPECT_DOUBLE_EQ(g.gamma(5.0), 1.0);
  EXPECT_DOUBLE_EQ(g.gamma(10.0), 4.0);
  EXPECT_DOUBLE_EQ(g.gamma(25.0), 25.0);
  EXPECT_DOUBLE_EQ(g.gamma(100.0), 100.0);
  g.kind = GammaModel::Kind::kConstant;
  g.constant = 3.0;
  EXPECT_DOUBLE_EQ(g.gamma(100.0), 3.0);
}

TEST(KalmanGain, SingularInnovationThrows) {
  Covariance P = Covariance::Zero();
  MeasurementMatrix<1> H = MeasurementMatrix<1>::Zero();
  H(0, 3) = 1.0;
  MeasurementCovariance<1> R;
  R << 0.0;
  EXPECT_THROW(kalman_gain<1>(P, H, R), SingularInnovationError);
  R << 1e-13;
  P(3, 3) = 1.0;
  EXPECT_NO_THROW(kalman_gain<1>(P, H, R));
  // Ill-conditioned 3x3 innovation.
  MeasurementMatrix<3> H3 = MeasurementMatrix<3>::Zero();
  H3.block<3, 3>(0, 3).setIdentity();
  Matrix3 R3 = Matrix3::Zero();
  Covariance P3 = Covariance::Zero();
  P3(3, 3) = 1.0;
  P3(4, 4) = 1.0;
  P3(5, 5) = 1e-14;
  EXPECT_THROW(kalman_gain<3>(P3, H3, R3), SingularInnovationError);
}

TEST(JosephUpdate, AgreesWithInformationForm) {
  std::mt19937_64 rng(11);
  NoiseConfig cfg;
  for (int trial = 0; trial < 50; ++trial) {
    BeliefState b;
    b.P = random_spd(rng);
    b.x_hat << 0.1, 0.2, 0.3, 3 + trial * 0.1, 4, -2;

    const auto m = uwb_model(b.x_hat, cfg.r_uwb);
    const auto u = uwb_update(b, m.predicted(0), cfg);
    EXPECT_TRUE(u.P.isApprox(information_posterior<1>(b.P, m.H, m.R), 1e-8));
    EXPECT_TRUE(u.x_hat.isApprox(b.x_hat, 1e-14));

    const auto c = camera_model(b.x_hat, cfg.R_cam);
    const auto cu = camera_update(b, c.predicted, cfg);
    EXPECT_TRUE(cu.P.isApprox(information_posterior<3>(b.P, c.H, c.R), 1e-6));

    const auto l = lidar_model(b.x_hat, cfg.R_lidar, 4.0);
    const auto lu = lidar_update(b, l.predicted, 4.0, cfg);
    EXPECT_TRUE(lu.P.isApprox(information_posterior<3>(b.P, l.H, l.R), 1e-8));
    EXPECT_EQ(lu.P, lu.P.transpose());
  }
}

TEST(JosephUpdate, InnovationMovesStateByGain) {
  NoiseConfig cfg;
  BeliefState b = initial_belief(Vec3(3, 4, -2));
  const auto out = lidar_update(b, Vec3(3.5, 4, -2), 1.0, cfg);
  // Scalar Kalman on r_N: K = 1 / (1 + 0.0225).
  EXPECT_NEAR(out.position().x(), 3.0 + 0.5 / 1.0225, 1e-12);
  EXPECT_NEAR(out.P(3, 3), 0.0225 / 1.0225, 1e-12);
  EXPECT_NEAR(out.position().y(), 4.0, 1e-15);
}

TEST(JosephUpdate, LongRunStaysSymmetricPositive) {
  NoiseConfig cfg;
  BeliefState b = initial_belief(Vec3(1, 0, -1));
  b.set_velocity(Vec3(0.5, 0, 0));
  for (int k = 1; k <= 5000; ++k) {
    b = predict(b, cfg);
    if (k % 10 == 0) b = altimeter_update(b, -b.x_hat(5), {}, cfg);
    if (k % 5 == 0) b = uwb_update(b, b.position().norm(), cfg);
    if (k % 5 == 0) {
      b = lidar_update(b, b.position(), cfg.gamma_model.gamma(b.position().norm()), cfg);
    }
    ASSERT_EQ(b.P, b.P.transpose());
    ASSERT_TRUE(b.P.allFinite());
  }
  EXPECT_TRUE(is_psd(b.P));
}

TEST(NoiseConfig, Validation) {
  NoiseConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  auto bad = cfg;
  bad.Q(0, 1) = 0.5;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = cfg;
  bad.R_lidar(0, 0) = -1.0;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = cfg;
  bad.ts = 0.0;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = cfg;
  bad.r_uwb = -0.1;
  EXPECT_THROW(bad.validate(), ValidationError);
}
