#include "gndi/controllers.hpp"

#include <cmath>
#include <stdexcept>

namespace gndi {
namespace {

constexpr double kSingularCos = 1e-6;

// RK4 step of xdot = A x + b with b held constant.
Eigen::VectorXd rk4_affine(const Eigen::MatrixXd& A, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& b, double dt) {
  if (x.size() == 0) return x;
  const Eigen::VectorXd k1 = A * x + b;
  const Eigen::VectorXd k2 = A * (x + 0.5 * dt * k1) + b;
  const Eigen::VectorXd k3 = A * (x + 0.5 * dt * k2) + b;
  const Eigen::VectorXd k4 = A * (x + dt * k3) + b;
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void require_positive_dt(double dt, const char* who) {
  if (!(dt > 0.0)) throw std::invalid_argument(std::string(who) + ": dt must be positive");
}

void require_3x3_io(const StateSpace& k, const char* who) {
  if (k.inputs() != 3 || k.outputs() != 3)
    throw std::invalid_argument(std::string(who) + ": compensator must be 3-in 3-out");
}

}  // namespace

RateController make_rate_controller(const StateSpace& compensator,
                                    const PlantParams& model) {
  require_3x3_io(compensator, "make_rate_controller");
  RateController c;
  c.law.A = compensator.A;
  c.law.B1 = -compensator.B;
  c.law.B2 = compensator.B;
  c.law.C = compensator.C;
  c.law.D1 = -compensator.D;
  c.law.D2 = compensator.D;
  c.model = model;
  c.x = Eigen::VectorXd::Zero(compensator.states());
  return c;
}

AttitudeController make_attitude_controller(const StateSpace& compensator,
                                            bool feedforward_enabled) {
  require_3x3_io(compensator, "make_attitude_controller");
  AttitudeController c;
  c.law = compensator;
  c.feedforward_enabled = feedforward_enabled;
  c.x = Eigen::VectorXd::Zero(compensator.states());
  return c;
}

EulerBaselineController make_euler_baseline(const StateSpace& compensator,
                                            bool feedforward_enabled) {
  require_3x3_io(compensator, "make_euler_baseline");
  EulerBaselineController c;
  c.law = compensator;
  c.feedforward_enabled = feedforward_enabled;
  c.x = Eigen::VectorXd::Zero(compensator.states());
  return c;
}

SensorModel make_delay_lag_sensor(double delay_s, int pade_order,
                                  double lag_cutoff_hz) {
  const StateSpace channel =
      series(pade_delay(delay_s, pade_order), lag_filter(lag_cutoff_hz));
  SensorModel m;
  m.blocks = diagonal({channel, channel, channel});
  m.x = Eigen::VectorXd::Zero(m.blocks.states());
  return m;
}

PartitionedStateSpace with_measurement_filter(const PartitionedStateSpace& law,
                                              const StateSpace& sensor) {
  if (sensor.inputs() != 3 || sensor.outputs() != 3)
    throw std::invalid_argument("with_measurement_filter: sensor must be 3-in 3-out");
  const int ns = sensor.states();
  const int nl = law.states();
  PartitionedStateSpace out;
  out.A = Eigen::MatrixXd::Zero(ns + nl, ns + nl);
  out.A.topLeftCorner(ns, ns) = sensor.A;
  if (nl > 0) {
    out.A.bottomLeftCorner(nl, ns) = law.B1 * sensor.C;
    out.A.bottomRightCorner(nl, nl) = law.A;
  }
  out.B1 = Eigen::MatrixXd::Zero(ns + nl, 3);
  out.B1.topRows(ns) = sensor.B;
  if (nl > 0) out.B1.bottomRows(nl) = law.B1 * sensor.D;
  out.B2 = Eigen::MatrixXd::Zero(ns + nl, 3);
  if (nl > 0) out.B2.bottomRows(nl) = law.B2;
  out.C = Eigen::MatrixXd::Zero(3, ns + nl);
  out.C.leftCols(ns) = law.D1 * sensor.C;
  if (nl > 0) out.C.rightCols(nl) = law.C;
  out.D1 = law.D1 * sensor.D;
  out.D2 = law.D2;
  return out;
}

Vec3 rate_ndi_output(const RateController& c, const Eigen::VectorXd& x,
                     const Vec3& omega, const Vec3& omega_ref,
                     const Vec3& accel_extra) {
  Vec3 nu = c.law.D1 * omega + c.law.D2 * omega_ref + accel_extra;
  if (c.law.states() > 0) nu += c.law.C * x;
  return omega.cross(c.model.J * omega) + c.model.kappa * omega + c.model.J * nu;
}

Vec3 rate_ndi(RateController& c, const Vec3& omega_meas, const Vec3& omega_ref,
              double dt, const Vec3& accel_extra) {
  require_positive_dt(dt, "rate_ndi");
  const Vec3 tau = rate_ndi_output(c, c.x, omega_meas, omega_ref, accel_extra);
  if (c.law.states() > 0)
    c.x = rk4_affine(c.law.A, c.x, c.law.B1 * omega_meas + c.law.B2 * omega_ref, dt);
  return tau;
}

Vec3 attitude_ndi_output(const AttitudeController& c, const Eigen::VectorXd& x,
                         const Mat3& R_d, const Mat3& R, const Vec3& omega_d) {
  const Mat3 R_e = attitude_error(R_d, R);
  const Vec3 e_R = attitude_error_vector(R_e);
  Vec3 cmd = c.law.D * e_R;
  if (c.law.states() > 0) cmd += c.law.C * x;
  if (c.feedforward_enabled) cmd += R_e.transpose() * omega_d;
  return cmd;
}

Vec3 attitude_ndi(AttitudeController& c, const Mat3& R_d, const Mat3& R,
                  const Vec3& omega_d, double dt) {
  require_positive_dt(dt, "attitude_ndi");
  const Vec3 cmd = attitude_ndi_output(c, c.x, R_d, R, omega_d);
  if (c.law.states() > 0) {
    const Vec3 e_R = attitude_error_vector(attitude_error(R_d, R));
    c.x = rk4_affine(c.law.A, c.x, c.law.B * e_R, dt);
  }
  return cmd;
}

Vec3 tracking_cancellation(const Mat3& R_e, const Vec3& omega_e,
                           const Vec3& omega_d, const Vec3& omega_d_dot) {
  const Vec3 rotated = R_e.transpose() * omega_d;
  return R_e.transpose() * omega_d_dot - omega_e.cross(rotated);
}

Vec3 euler_zyx(const Mat3& R) {
  const double s_pitch = std::clamp(-R(2, 0), -1.0, 1.0);
  return {std::atan2(R(2, 1), R(2, 2)), std::asin(s_pitch),
          std::atan2(R(1, 0), R(0, 0))};
}

Vec3 wrap_angles(const Vec3& a) {
  Vec3 w;
  for (int i = 0; i < 3; ++i) {
    w(i) = std::remainder(a(i), 2.0 * M_PI);
    if (w(i) <= -M_PI) w(i) = M_PI;
  }
  return w;
}

Mat3 euler_rate_matrix(const Vec3& phi, bool* saturated) {
  const double sr = std::sin(phi(0)), cr = std::cos(phi(0));
  const double sp = std::sin(phi(1));
  double cp = std::cos(phi(1));
  if (std::abs(cp) < kSingularCos) {
    if (saturated != nullptr) *saturated = true;
    cp = std::copysign(kSingularCos, cp == 0.0 ? 1.0 : cp);
  }
  const double tp = sp / cp;
  Mat3 w;
  w << 1.0, sr * tp, cr * tp,
       0.0, cr, -sr,
       0.0, sr / cp, cr / cp;
  return w;
}

Mat3 body_rate_matrix(const Vec3& phi) {
  const double sr = std::sin(phi(0)), cr = std::cos(phi(0));
  const double sp = std::sin(phi(1)), cp = std::cos(phi(1));
  Mat3 e;
  e << 1.0, 0.0, -sp,
       0.0, cr, sr * cp,
       0.0, -sr, cr * cp;
  return e;
}

Vec3 euler_attitude_error(const Mat3& R_d, const Mat3& R) {
  return wrap_angles(euler_zyx(R) - euler_zyx(R_d));
}

Vec3 euler_baseline_output(const EulerBaselineController& c,
                           const Eigen::VectorXd& x, const Mat3& R_d,
                           const Mat3& R, const Vec3& omega_d, bool* saturated) {
  const Vec3 phi = euler_zyx(R);
  const Vec3 e_phi = euler_attitude_error(R_d, R);
  Vec3 rates = c.law.D * e_phi;
  if (c.law.states() > 0) rates += c.law.C * x;
  bool sat = std::abs(std::cos(phi(1))) < kSingularCos;
  if (c.feedforward_enabled)
    rates += euler_rate_matrix(euler_zyx(R_d), &sat) * omega_d;
  if (saturated != nullptr) *saturated = sat;
  return body_rate_matrix(phi) * rates;
}

Vec3 euler_ndi_baseline(EulerBaselineController& c, const Mat3& R_d,
                        const Mat3& R, const Vec3& omega_d, double dt) {
  require_positive_dt(dt, "euler_ndi_baseline");
  bool sat = false;
  const Vec3 cmd = euler_baseline_output(c, c.x, R_d, R, omega_d, &sat);
  if (sat) c.singularity_flag = true;
  if (c.law.states() > 0)
    c.x = rk4_affine(c.law.A, c.x, c.law.B * euler_attitude_error(R_d, R), dt);
  return cmd;
}

Vec3 sense(SensorModel& m, const Vec3& omega_true, double dt) {
  require_positive_dt(dt, "sense");
  const Vec3 y = output(m.blocks, m.x, omega_true);
  m.x = step(m.blocks, m.x, omega_true, dt);
  return y;
}

}  // namespace gndi
