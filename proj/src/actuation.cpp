#include "gndi/actuation.hpp"

#include <cmath>
#include <stdexcept>

namespace gndi {

namespace {

constexpr double kRankTol = 1e-12;

void require_positive_dt(double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
}

RotorVector clamp_band(const RotorVector& u, double lo, double hi) {
  return u.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace

RotorGeometry hex_geometry(double arm_length, double k_f, double k_m) {
  if (!(arm_length > 0.0) || !(k_f > 0.0) || !(k_m >= 0.0))
    throw std::invalid_argument("hex_geometry: arm length and k_f must be positive, k_m nonnegative");
  RotorGeometry g;
  for (int i = 0; i < kRotorCount; ++i) {
    const double th = M_PI / 3.0 * i;
    g.position.col(i) = arm_length * Eigen::Vector3d(std::cos(th), std::sin(th), 0.0);
    g.spin(i) = (i % 2 == 0) ? 1.0 : -1.0;
  }
  g.k_f.setConstant(k_f);
  g.k_m.setConstant(k_m);
  return g;
}

EffectivenessMatrix effectiveness_matrix(const RotorGeometry& g) {
  EffectivenessMatrix B;
  for (int i = 0; i < kRotorCount; ++i) {
    const Eigen::Vector3d f = g.k_f(i) * Eigen::Vector3d::UnitZ();
    const Eigen::Vector3d tau =
        g.position.col(i).cross(f) - g.spin(i) * g.k_m(i) * Eigen::Vector3d::UnitZ();
    B(0, i) = g.k_f(i);
    B.block<3, 1>(1, i) = tau;
  }
  return B;
}

RotorVector allocate(const Eigen::Vector3d& tau_cmd, double thrust_cmd,
                     const EffectivenessMatrix& B) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues()(3) <= kRankTol * svd.singularValues()(0))
    throw std::invalid_argument("allocate: rotor geometry is rank deficient, wrench not realizable");
  Eigen::Vector4d c;
  c << thrust_cmd, tau_cmd;
  return svd.solve(c);  // least squares with exact rhs: the minimum-norm solution
}

ActuatorState make_actuators(const RotorVector& speed_sq, double time_constant,
                             double speed_min, double speed_max) {
  if (!(time_constant > 0.0))
    throw std::invalid_argument("make_actuators: time constant must be positive");
  if (!(speed_min >= 0.0) || !(speed_max > speed_min))
    throw std::invalid_argument("make_actuators: need 0 <= min < max speed");
  ActuatorState a;
  a.time_constant = time_constant;
  a.speed_min = speed_min;
  a.speed_max = speed_max;
  if ((speed_sq.array() < speed_min * speed_min - 1e-12).any() ||
      (speed_sq.array() > speed_max * speed_max + 1e-12).any())
    throw std::invalid_argument("make_actuators: initial speeds outside the limit band");
  a.speed_sq = speed_sq;
  return a;
}

ActuatorState motor_step(const ActuatorState& a, const RotorVector& cmd, double dt) {
  require_positive_dt(dt);
  const double lo = a.speed_min * a.speed_min;
  const double hi = a.speed_max * a.speed_max;
  const RotorVector c = clamp_band(cmd, lo, hi);
  const double decay = std::exp(-dt / a.time_constant);
  ActuatorState out = a;
  out.speed_sq = c + (a.speed_sq - c) * decay;
  out.speed_sq = clamp_band(out.speed_sq, lo, hi);  // only binds for out-of-band starts
  return out;
}

std::pair<double, Eigen::Vector3d> applied_wrench(const ActuatorState& a,
                                                  const EffectivenessMatrix& B) {
  const Eigen::Vector4d w = B * a.speed_sq;
  return {w(0), w.tail<3>()};
}

}  // namespace gndi
