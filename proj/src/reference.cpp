#include "gndi/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace gndi {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

}  // namespace

Mat3 flip_sequence_target(double t) {
  if (t < 0.0) throw std::invalid_argument("flip_sequence_target: t must be nonnegative");
  if (t <= 2.0) return exp_so3(kTwoPi * t * Vec3::UnitX());
  if (t > 2.5 && t <= 4.5) return exp_so3(kTwoPi * (t - 2.5) * Vec3::UnitY());
  return Mat3::Identity();
}

ReferenceFilter make_reference_filter(const Mat3& R0, const Vec3& omega0,
                                      double natural_frequency, double damping_ratio) {
  if (!is_rotation(R0, 1e-6))
    throw std::invalid_argument("make_reference_filter: R0 is not a rotation");
  if (!(natural_frequency > 0.0) || !(damping_ratio > 0.0))
    throw std::invalid_argument("make_reference_filter: wn and zeta must be positive");
  ReferenceFilter f;
  f.R_d = R0;
  f.omega_d = omega0;
  f.natural_frequency = natural_frequency;
  f.damping_ratio = damping_ratio;
  return f;
}

Vec3 filter_acceleration(const Mat3& R_d, const Vec3& omega_d, const Mat3& target,
                         double natural_frequency, double damping_ratio) {
  const double kp = natural_frequency * natural_frequency;
  const double kd = 2.0 * damping_ratio * natural_frequency;
  return -kp * attitude_error_vector(target.transpose() * R_d) - kd * omega_d;
}

ReferenceSample filter_step(ReferenceFilter& f, const Mat3& target, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("filter_step: dt must be positive");
  if (!is_rotation(target, 1e-6))
    throw std::invalid_argument("filter_step: target is not a rotation");

  struct Stage {
    Vec3 dxi, domega;
  };
  const auto eval = [&](const Vec3& xi, const Vec3& omega) -> Stage {
    const Mat3 R = f.R_d * exp_so3(xi);
    return {inverse_dexp(xi, omega),
            filter_acceleration(R, omega, target, f.natural_frequency, f.damping_ratio)};
  };

  const Vec3 xi0 = Vec3::Zero();
  const Stage k1 = eval(xi0, f.omega_d);
  const Stage k2 = eval(xi0 + 0.5 * dt * k1.dxi, f.omega_d + 0.5 * dt * k1.domega);
  const Stage k3 = eval(xi0 + 0.5 * dt * k2.dxi, f.omega_d + 0.5 * dt * k2.domega);
  const Stage k4 = eval(xi0 + dt * k3.dxi, f.omega_d + dt * k3.domega);

  const Vec3 xi = dt / 6.0 * (k1.dxi + 2.0 * k2.dxi + 2.0 * k3.dxi + k4.dxi);
  f.R_d = f.R_d * exp_so3(xi);
  f.omega_d += dt / 6.0 * (k1.domega + 2.0 * k2.domega + 2.0 * k3.domega + k4.domega);
  f.t += dt;

  ReferenceSample s;
  s.R_d = f.R_d;
  s.omega_d = f.omega_d;
  s.omega_d_dot =
      filter_acceleration(f.R_d, f.omega_d, target, f.natural_frequency, f.damping_ratio);
  s.t = f.t;
  return s;
}

}  // namespace gndi
