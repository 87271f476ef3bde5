#include "gndi/plant.hpp"

#include <stdexcept>

namespace gndi {

Vec3 body_derivative(const BodyState& s, const Vec3& tau, const PlantParams& p) {
  const Vec3 momentum = p.J * s.omega;
  return p.J.inverse() * (tau - s.omega.cross(momentum) - p.kappa * s.omega);
}

BodyState integrate_step(const BodyState& s, const Vec3& tau, const PlantParams& p,
                         double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_step: dt must be positive");

  const Mat3 Jinv = p.J.inverse();
  const auto f = [&](const Vec3& w) -> Vec3 {
    return Jinv * (tau - w.cross(p.J * w) - p.kappa * w);
  };

  const Vec3 w1 = s.omega;
  const Vec3 k1 = f(w1);
  const Vec3 w2 = s.omega + 0.5 * dt * k1;
  const Vec3 k2 = f(w2);
  const Vec3 w3 = s.omega + 0.5 * dt * k2;
  const Vec3 k3 = f(w3);
  const Vec3 w4 = s.omega + dt * k3;
  const Vec3 k4 = f(w4);

  BodyState out;
  out.omega = s.omega + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  const Vec3 omega_mid = (w1 + 2.0 * w2 + 2.0 * w3 + w4) / 6.0;
  out.R = s.R * exp_so3(dt * omega_mid);
  return out;
}

}  // namespace gndi
