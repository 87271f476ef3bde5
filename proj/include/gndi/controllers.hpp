#pragma once

#include "gndi/lti.hpp"
#include "gndi/plant.hpp"
#include "gndi/so3.hpp"

namespace gndi {

/// Inner-loop rate controller. `law` maps the partitioned input
/// (omega, omega_ref) to the desired angular acceleration; `model` is
/// the plant copy used for the inversion. Both input partitions are
/// width 3 and the output is width 3.
struct RateController {
  PartitionedStateSpace law;
  PlantParams model;
  Eigen::VectorXd x;
};

/// Outer-loop geometric attitude controller. `law` maps the attitude
/// error vector to a rate correction; the feedforward R_e^T omega_d is
/// added to the output when enabled.
struct AttitudeController {
  StateSpace law;
  bool feedforward_enabled = true;
  Eigen::VectorXd x;
};

/// Rate measurement path: per-channel transport delay (Pade state) in
/// series with a first-order lag, unit DC gain.
struct SensorModel {
  StateSpace blocks;
  Eigen::VectorXd x;
};

/// Euler-angle NDI controller used as a comparison baseline. Shares
/// the compensator family of AttitudeController but works on ZYX
/// (yaw-pitch-roll) angles. `singularity_flag` latches once any
/// kinematic inversion had to be saturated near |cos(pitch)| = 0.
struct EulerBaselineController {
  StateSpace law;
  bool feedforward_enabled = true;
  Eigen::VectorXd x;
  bool singularity_flag = false;
};

/// Wraps a 3-in 3-out compensator K into the rate law
///   nu = K(s) (omega_ref - omega),
/// i.e. B1 = -B_K, D1 = -D_K on the feedback path and B2 = +B_K,
/// D2 = +D_K on the reference path. State starts at zero.
RateController make_rate_controller(const StateSpace& compensator,
                                    const PlantParams& model);

AttitudeController make_attitude_controller(const StateSpace& compensator,
                                            bool feedforward_enabled = true);

EulerBaselineController make_euler_baseline(const StateSpace& compensator,
                                            bool feedforward_enabled = true);

/// Three identical measurement channels, each a Pade-approximated
/// transport delay in series with a unit-DC first-order lag.
SensorModel make_delay_lag_sensor(double delay_s = 0.005, int pade_order = 3,
                                  double lag_cutoff_hz = 100.0);

/// Realization of the rate law with the measurement dynamics absorbed
/// into the omega path: the returned block maps (omega_true, omega_ref)
/// to the commanded acceleration with the sensor states appended in
/// front of the compensator states. Used for closed-loop analysis of
/// the loop as actually flown.
PartitionedStateSpace with_measurement_filter(const PartitionedStateSpace& law,
                                              const StateSpace& sensor);

/// Control torque at an explicit compensator state (pure function used
/// by co-integrating simulators):
///   tau = omega x J omega + kappa omega
///       + J (C x + D1 omega + D2 omega_ref + accel_extra).
Vec3 rate_ndi_output(const RateController& c, const Eigen::VectorXd& x,
                     const Vec3& omega, const Vec3& omega_ref,
                     const Vec3& accel_extra = Vec3::Zero());

/// Torque at the current state, then RK4 advance of the compensator
/// state with inputs held over [0, dt] (sample first, then advance).
Vec3 rate_ndi(RateController& c, const Vec3& omega_meas, const Vec3& omega_ref,
              double dt, const Vec3& accel_extra = Vec3::Zero());

/// Rate command at an explicit compensator state:
///   omega_cmd = [R_e^T omega_d] + C x + D e_R,
/// with the bracketed feedforward present iff enabled.
Vec3 attitude_ndi_output(const AttitudeController& c, const Eigen::VectorXd& x,
                         const Mat3& R_d, const Mat3& R, const Vec3& omega_d);

/// Command at the current state, then RK4 advance of the state driven
/// by the attitude error vector held over [0, dt].
Vec3 attitude_ndi(AttitudeController& c, const Mat3& R_d, const Mat3& R,
                  const Vec3& omega_d, double dt);

/// Feedforward acceleration that cancels the motion of the rotated
/// desired rate in tracking:
///   R_e^T omega_d_dot - omega_e x (R_e^T omega_d),
/// which equals d/dt (R_e^T omega_d) along the error kinematics. Feed
/// it to rate_ndi's accel_extra; it is multiplied by J there.
Vec3 tracking_cancellation(const Mat3& R_e, const Vec3& omega_e,
                           const Vec3& omega_d, const Vec3& omega_d_dot);

/// ZYX (yaw-pitch-roll) angles (roll, pitch, yaw) of R = Rz Ry Rx.
/// Pitch is clamped to [-pi/2, pi/2]; at |cos(pitch)| = 0 roll and yaw
/// are not separately observable and the returned pair is arbitrary.
Vec3 euler_zyx(const Mat3& R);

/// Componentwise wrap to (-pi, pi].
Vec3 wrap_angles(const Vec3& a);

/// W(phi): maps body rates to ZYX Euler-angle rates, Phi_dot = W omega.
/// Contains tan(pitch) and 1/cos(pitch); when |cos(pitch)| < 1e-6 the
/// cosine is clamped to +/-1e-6 and *saturated (if given) is set.
Mat3 euler_rate_matrix(const Vec3& phi, bool* saturated = nullptr);

/// E(phi) = W(phi)^{-1}: maps Euler-angle rates to body rates. Entries
/// are bounded for all phi (E itself is singular at the gimbal lock).
Mat3 body_rate_matrix(const Vec3& phi);

/// Wrapped angle error Phi - Phi_d between two attitudes, oriented the
/// same way as the geometric attitude error vector so that a shared
/// compensator (negative gains) stabilizes both loops.
Vec3 euler_attitude_error(const Mat3& R_d, const Mat3& R);

/// Baseline rate command at an explicit state:
///   omega_cmd = E(Phi) ([W(Phi_d) omega_d] + C x + D e_Phi),
/// feedforward bracketed as above. *saturated reports whether the
/// reference rate map was saturated or the current attitude sits
/// within |cos(pitch)| < 1e-6 of the kinematic singularity.
Vec3 euler_baseline_output(const EulerBaselineController& c,
                           const Eigen::VectorXd& x, const Mat3& R_d,
                           const Mat3& R, const Vec3& omega_d,
                           bool* saturated = nullptr);

/// Command at the current state, then RK4 advance driven by the angle
/// error; latches singularity_flag when a saturation occurred.
Vec3 euler_ndi_baseline(EulerBaselineController& c, const Mat3& R_d,
                        const Mat3& R, const Vec3& omega_d, double dt);

/// Measurement at the current sensor state, then RK4 advance with the
/// true rate held over [0, dt] (sample first, then advance).
Vec3 sense(SensorModel& m, const Vec3& omega_true, double dt);

}  // namespace gndi
