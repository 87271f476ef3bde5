#pragma once

#include "gndi/so3.hpp"

namespace gndi {

/// One sample of a smooth attitude reference trajectory. The triple is
/// kinematically consistent: Rdot_d = R_d hat(omega_d), and omega_d_dot
/// is the exact angular acceleration the generating law assigns.
struct ReferenceSample {
  Mat3 R_d = Mat3::Identity();
  Vec3 omega_d = Vec3::Zero();
  Vec3 omega_d_dot = Vec3::Zero();
  double t = 0.0;
};

/// Piecewise attitude command of the flip sequence: two full roll
/// revolutions swept at 2 pi rad/s on [0, 2], identity hold, then two
/// full pitch revolutions on (2.5, 4.5], identity afterwards. The map
/// is continuous in t (each ramp starts and ends at identity).
/// Throws std::invalid_argument on t < 0.
Mat3 flip_sequence_target(double t);

/// Second-order tracking filter on the rotation group. Turns a
/// possibly-discontinuous-rate attitude command into a smooth
/// (R_d, omega_d, omega_d_dot) triple via the double-integrator law
///   omega_d_dot = -wn^2 e_R(target^T R_d) - 2 zeta wn omega_d,
/// whose small-angle linearization about the target has the classic
/// poles of s^2 + 2 zeta wn s + wn^2. Almost globally convergent for a
/// fixed target (the antipodal set is repelling).
struct ReferenceFilter {
  Mat3 R_d = Mat3::Identity();
  Vec3 omega_d = Vec3::Zero();
  double natural_frequency = 15.0;  // wn, rad/s
  double damping_ratio = 0.707;     // zeta
  double t = 0.0;
};

/// Validating constructor. Requires a valid rotation and positive wn,
/// zeta; throws std::invalid_argument otherwise.
ReferenceFilter make_reference_filter(const Mat3& R0, const Vec3& omega0,
                                      double natural_frequency = 15.0,
                                      double damping_ratio = 0.707);

/// The filter's angular acceleration at an arbitrary state. Pure, so
/// integrator stages can evaluate it off the committed state.
Vec3 filter_acceleration(const Mat3& R_d, const Vec3& omega_d, const Mat3& target,
                         double natural_frequency, double damping_ratio);

/// Advances the filter by one RK4 step in exponential chart coordinates
/// against a target held fixed over the step, and returns the advanced
/// sample with omega_d_dot evaluated from the law at the new state.
/// Throws std::invalid_argument on dt <= 0 or an invalid target.
ReferenceSample filter_step(ReferenceFilter& f, const Mat3& target, double dt);

}  // namespace gndi
