#pragma once

#include <utility>

#include <Eigen/Dense>

namespace gndi {

inline constexpr int kRotorCount = 6;

using RotorVector = Eigen::Matrix<double, kRotorCount, 1>;
using EffectivenessMatrix = Eigen::Matrix<double, 4, kRotorCount>;

/// Co-planar multirotor geometry: every rotor thrusts along body +z, so
/// the wrench is linear in the squared rotor speeds.
///
/// spin(i) = +1 means rotor i turns counterclockwise about body +z; its
/// aerodynamic reaction torque on the airframe is -k_m(i) * u_i about +z.
struct RotorGeometry {
  Eigen::Matrix<double, 3, kRotorCount> position;  // hub positions, body frame (m)
  RotorVector spin;                                // +1 CCW, -1 CW about +z
  RotorVector k_f;                                 // thrust per squared speed, N/(rad/s)^2
  RotorVector k_m;                                 // drag torque per squared speed, N*m/(rad/s)^2
};

/// Regular hexagon of arm length L: rotor 0 on +x, counterclockwise
/// placement at 60 degree spacing, alternating spin directions (net
/// drag torque vanishes at equal speeds). Uniform coefficients.
RotorGeometry hex_geometry(double arm_length, double k_f, double k_m);

/// Rows map squared speeds to (thrust, tau_x, tau_y, tau_z): thrust row
/// is k_f per rotor, torque rows are r x F plus spin-signed drag.
EffectivenessMatrix effectiveness_matrix(const RotorGeometry& g);

/// Minimum-norm squared-speed command realizing [thrust; tau], computed
/// through the SVD of B. Entries may fall outside the feasible speed
/// band (including below zero); motor_step clamps them.
/// Throws std::invalid_argument when B is not full row rank.
RotorVector allocate(const Eigen::Vector3d& tau_cmd, double thrust_cmd,
                     const EffectivenessMatrix& B);

/// First-order motor fleet state in squared-speed coordinates.
struct ActuatorState {
  RotorVector speed_sq = RotorVector::Zero();  // rad^2/s^2
  double time_constant = 0.02;                 // s
  double speed_min = 0.0;                      // rad/s
  double speed_max = 900.0;                    // rad/s
};

/// Validating constructor; speeds start inside [min, max] or it throws.
ActuatorState make_actuators(const RotorVector& speed_sq, double time_constant,
                             double speed_min, double speed_max);

/// Exact first-order step toward the command: the command is clamped to
/// [min^2, max^2] first, then u+ = c + (u - c) exp(-dt/tau). A state
/// already inside the band stays inside for any dt. Throws on dt <= 0.
ActuatorState motor_step(const ActuatorState& a, const RotorVector& cmd, double dt);

/// Wrench currently delivered by the fleet: forward map through B of the
/// actual (not commanded) squared speeds. First element thrust, then torque.
std::pair<double, Eigen::Vector3d> applied_wrench(const ActuatorState& a,
                                                  const EffectivenessMatrix& B);

}  // namespace gndi
