#pragma once

#include <Eigen/Dense>

namespace gndi {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Hat map R^3 -> so(3): hat(v) * w == v x w.
///
/// For v = [v1, v2, v3]:
///          [  0  -v3   v2 ]
/// hat(v) = [  v3   0  -v1 ]
///          [ -v2   v1   0 ]
Mat3 hat(const Vec3& v);

/// Vee map so(3) -> R^3, inverse of hat.
///
/// Throws std::invalid_argument if the symmetric part of S exceeds 1e-9
/// in Frobenius norm (corrupted input, not a skew matrix).
Vec3 vee(const Mat3& S);

/// True when ||R^T R - I||_F <= tol and det(R) > 0.
bool is_rotation(const Mat3& R, double tol = 1e-9);

/// Exponential map so(3) -> SO(3) in Rodrigues closed form.
///
/// Uses a second-order Taylor expansion of the Rodrigues coefficients
/// for ||v|| < 1e-6 to avoid 0/0.
Mat3 exp_so3(const Vec3& v);

/// Logarithm map SO(3) -> so(3), returned as a rotation vector with
/// norm in [0, pi].
///
/// At trace(R) = -1 (angle pi) the axis is recovered from the dominant
/// diagonal entry of (R + I)/2 and the sign is fixed so that the first
/// nonzero component is positive.
Vec3 log_so3(const Mat3& R);

/// Attitude error R_e = R_d^T R (rotation from desired body frame to
/// actual body frame).
Mat3 attitude_error(const Mat3& R_d, const Mat3& R);

/// Configuration error function Psi = 1/2 trace(I - R_e), in [0, 2].
/// Equals one quarter of the chordal distance between R_d and R.
double config_error(const Mat3& R_d, const Mat3& R);

/// Attitude error vector e_R = 1/2 (R_e - R_e^T)^vee, the
/// left-trivialized derivative of the configuration error function.
/// Its norm is at most 1.
Vec3 attitude_error_vector(const Mat3& R_e);

/// Error Jacobian E(R_e) = 1/2 (trace(R_e) I - R_e^T).
///
/// Maps angular velocity error to the rate of the attitude error
/// vector: d/dt e_R = E(R_e) omega_e. Singular at error angles pi/2
/// and pi.
Mat3 error_jacobian(const Mat3& R_e);

/// Angular velocity error omega_e = omega - R_e^T omega_d.
Vec3 angular_velocity_error(const Vec3& omega, const Mat3& R_e, const Vec3& omega_d);

/// Nearest rotation matrix in Frobenius norm (polar factor of M).
///
/// Idempotent on valid rotations. Throws std::invalid_argument for
/// det(M) <= 0, which signals integration blow-up rather than drift.
Mat3 project_to_so3(const Mat3& M);

/// Chart velocity of the body-frame exponential coordinates: if
/// R(t) = R0 exp_so3(xi(t)) and Rdot = R hat(omega), then
/// xi_dot = inverse_dexp(xi, omega)
///        = omega + 1/2 xi x omega + gamma(||xi||) xi x (xi x omega),
/// with gamma(a) = 1/a^2 - (1 + cos a) / (2 a sin a) in closed form and
/// its Taylor expansion gamma = 1/12 + a^2/720 + ... below a = 1e-4.
/// Valid for ||xi|| < 2 pi; the chart degenerates at the boundary.
Vec3 inverse_dexp(const Vec3& xi, const Vec3& omega);

}  // namespace gndi
