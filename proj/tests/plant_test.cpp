#include "gndi/plant.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

namespace {

using gndi::BodyState;
using gndi::Mat3;
using gndi::PlantParams;
using gndi::Vec3;

PlantParams tumbling_params() {
  PlantParams p;
  p.J = Eigen::DiagonalMatrix<double, 3>(0.045, 0.052, 0.08);
  return p;
}

TEST(Plant, EquilibriumAndPrincipalAxisSpinHaveZeroAcceleration) {
  PlantParams p;
  p.J = Eigen::DiagonalMatrix<double, 3>(1.0, 2.0, 3.0);

  BodyState rest;
  EXPECT_EQ(gndi::body_derivative(rest, Vec3::Zero(), p), Vec3::Zero());

  // Spin about a principal axis: J omega is parallel to omega, so the
  // gyroscopic term vanishes.
  BodyState spin;
  spin.omega = Vec3(0.0, 0.0, 4.0);
  EXPECT_LE(gndi::body_derivative(spin, Vec3::Zero(), p).norm(), 1e-15);
}

TEST(Plant, DerivativeMatchesComponentwiseArithmetic) {
  PlantParams p;
  p.J = Eigen::DiagonalMatrix<double, 3>(1.0, 2.0, 3.0);
  BodyState s;
  s.omega = Vec3(1.0, 1.0, 1.0);

  // Independent arithmetic: J omega = (1,2,3) and omega x J omega
  // computed from the cross-product formula one component at a time.
  const Vec3 Jw(1.0, 2.0, 3.0);
  const Vec3 gyro(1.0 * Jw(2) - 1.0 * Jw(1),
                  1.0 * Jw(0) - 1.0 * Jw(2),
                  1.0 * Jw(1) - 1.0 * Jw(0));
  const Vec3 expected(-gyro(0) / 1.0, -gyro(1) / 2.0, -gyro(2) / 3.0);
  EXPECT_EQ(expected, Vec3(-1.0, 1.0, -1.0 / 3.0));

  const Vec3 got = gndi::body_derivative(s, Vec3::Zero(), p);
  EXPECT_LE((got - expected).norm(), 1e-14);
}

TEST(Plant, DampingEntersLinearlyInOmega) {
  PlantParams p;
  p.kappa = 0.5 * Mat3::Identity();
  BodyState s;
  s.omega = Vec3(2.0, 0.0, 0.0);
  const Vec3 got = gndi::body_derivative(s, Vec3::Zero(), p);
  EXPECT_LE((got - Vec3(-1.0, 0.0, 0.0)).norm(), 1e-15);

  // Torque input is additive through J^{-1}.
  const Vec3 driven = gndi::body_derivative(s, Vec3(1.0, 2.0, 3.0), p);
  EXPECT_LE((driven - (got + Vec3(1.0, 2.0, 3.0))).norm(), 1e-15);
}

TEST(Plant, StepRejectsNonPositiveDt) {
  BodyState s;
  EXPECT_THROW(gndi::integrate_step(s, Vec3::Zero(), PlantParams{}, 0.0),
               std::invalid_argument);
  EXPECT_THROW(gndi::integrate_step(s, Vec3::Zero(), PlantParams{}, -1e-3),
               std::invalid_argument);
}

TEST(Plant, ZeroStateIsAFixedPoint) {
  PlantParams p = tumbling_params();
  BodyState s;
  const BodyState next = gndi::integrate_step(s, Vec3::Zero(), p, 1e-3);
  EXPECT_EQ(next.R, Mat3::Identity());
  EXPECT_EQ(next.omega, Vec3::Zero());
}

TEST(Plant, GyroscopicFeedforwardHoldsConstantSpin) {
  PlantParams p = tumbling_params();
  p.kappa = Mat3::Identity() * 0.01;
  p.kappa(0, 1) = 0.002;
  p.kappa(1, 0) = 0.002;

  const Vec3 omega(0.3, 0.2, -0.1);
  const Vec3 tau = omega.cross(p.J * omega) + p.kappa * omega;

  BodyState s;
  s.omega = omega;
  const double dt = 1e-3;
  const int steps = 2000;
  for (int i = 0; i < steps; ++i) s = gndi::integrate_step(s, tau, p, dt);

  EXPECT_LE((s.omega - omega).norm(), 1e-12);

  // Constant omega makes the group update exact: the arc traversed is
  // ||omega|| t about the fixed axis (kept below pi so the log does
  // not wrap).
  const double t = dt * steps;
  const Vec3 arc = gndi::log_so3(s.R);
  EXPECT_LE(std::abs(arc.norm() - omega.norm() * t), 1e-8);
  EXPECT_LE((arc / arc.norm() - omega / omega.norm()).norm(), 1e-8);
}

TEST(Plant, DampingMakesKineticEnergyStrictlyDecrease) {
  PlantParams p = tumbling_params();
  p.kappa = 0.004 * Mat3::Identity();

  BodyState s;
  s.omega = Vec3(1.0, -2.0, 0.5);
  double energy = 0.5 * s.omega.dot(p.J * s.omega);
  for (int i = 0; i < 2000; ++i) {
    s = gndi::integrate_step(s, Vec3::Zero(), p, 1e-3);
    const double next = 0.5 * s.omega.dot(p.J * s.omega);
    ASSERT_LT(next, energy) << "step " << i;
    energy = next;
  }
}

TEST(Plant, RotationStaysOrthonormalOverAMillionSteps) {
  PlantParams p = tumbling_params();
  std::mt19937_64 rng(501);
  BodyState s;
  s.R = testsup::random_rotation(rng);
  s.omega = Vec3(2.0, -1.5, 1.0);

  const int steps = 1000000;
  for (int i = 0; i < steps; ++i) s = gndi::integrate_step(s, Vec3::Zero(), p, 1e-3);

  EXPECT_LE((s.R.transpose() * s.R - Mat3::Identity()).norm(), 1e-9);
  EXPECT_NEAR(s.R.determinant(), 1.0, 1e-9);
}

TEST(Plant, FreeBodyConservesEnergyAndInertialMomentum) {
  PlantParams p;
  p.J = Eigen::DiagonalMatrix<double, 3>(1.0, 2.0, 3.0);

  BodyState s;
  s.omega = Vec3(0.8, 0.4, -0.6);
  const double energy0 = 0.5 * s.omega.dot(p.J * s.omega);
  const Vec3 momentum0 = s.R * (p.J * s.omega);

  // The attitude update is second order, so the inertial momentum
  // drifts as O(dt^2 t); dt = 2e-4 keeps 10 s of tumbling well inside
  // the 1e-6 budget.
  const double dt = 2e-4;
  const int steps = 50000;
  for (int i = 0; i < steps; ++i) s = gndi::integrate_step(s, Vec3::Zero(), p, dt);

  const double energy = 0.5 * s.omega.dot(p.J * s.omega);
  EXPECT_LE(std::abs(energy - energy0), 1e-6);
  EXPECT_LE((s.R * (p.J * s.omega) - momentum0).norm(), 1e-6);
}

TEST(Plant, AngularVelocityConvergesAtFourthOrder) {
  PlantParams p = tumbling_params();
  p.kappa = 0.002 * Mat3::Identity();
  const Vec3 omega0(1.2, -0.7, 0.9);
  const Vec3 tau(0.01, -0.02, 0.015);
  const double horizon = 0.5;

  const auto endpoint = [&](double dt) {
    BodyState s;
    s.omega = omega0;
    const int n = static_cast<int>(std::round(horizon / dt));
    for (int i = 0; i < n; ++i) s = gndi::integrate_step(s, tau, p, dt);
    return s.omega;
  };

  const Vec3 reference = endpoint(horizon / 4096.0);
  const double e1 = (endpoint(horizon / 64.0) - reference).norm();
  const double e2 = (endpoint(horizon / 128.0) - reference).norm();
  EXPECT_GE(e1 / e2, 14.0);
}

}  // namespace
