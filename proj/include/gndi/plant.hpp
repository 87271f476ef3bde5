#pragma once

#include "gndi/so3.hpp"

namespace gndi {

/// Rotational rigid-body parameters. kappa is the rotational damping
/// coefficient, generalized to a full matrix with scalar*I as the
/// common case; J must be symmetric positive definite.
struct PlantParams {
  Mat3 J = Mat3::Identity();
  Mat3 kappa = Mat3::Zero();
};

/// Attitude and body-frame angular velocity.
struct BodyState {
  Mat3 R = Mat3::Identity();
  Vec3 omega = Vec3::Zero();
};

/// Euler's equations with damping:
///   omega_dot = J^{-1} (tau - omega x J omega - kappa omega).
Vec3 body_derivative(const BodyState& s, const Vec3& tau, const PlantParams& p);

/// One fixed step of the coupled dynamics with tau held constant.
/// omega advances by classical RK4; R advances by the group update
/// R+ = R exp(dt * omega_mid) with omega_mid the RK4-weighted average
/// of the stage velocities, which is exact for constant omega and
/// keeps R on the rotation group to roundoff (no per-step projection;
/// long integrations apply project_to_so3 defensively every ~1000
/// steps).
BodyState integrate_step(const BodyState& s, const Vec3& tau, const PlantParams& p,
                         double dt);

}  // namespace gndi
