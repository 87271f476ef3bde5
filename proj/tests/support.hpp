#pragma once

// Shared test fixtures: seeded random samplers and slow-but-obviously-
// correct oracles that the library code must reproduce.

#include <complex>
#include <random>

#include <Eigen/Dense>

#include "gndi/so3.hpp"

namespace testsup {

/// One RK4 step of the coupled dynamics
///   R' = R hat(omega(R, x, t)),  x' = xdot(R, x, t)
/// taken in exponential local coordinates xi about the entry R, with
/// the inverse-dexp series truncated after the xi^2 term:
///   xi' = w + (xi x w) / 2 + xi x (xi x w) / 12.
/// The truncation error is O(|xi|^4 |w|) per stage, far below the RK4
/// error for the step sizes used in tests.
template <class OmegaFn, class XdotFn>
inline void rotation_rk4_step(Eigen::Matrix3d& R, Eigen::VectorXd& x, double t,
                              double dt, const OmegaFn& omega_of,
                              const XdotFn& xdot_of) {
  using Eigen::Vector3d;
  using Eigen::VectorXd;
  struct Stage {
    Vector3d dxi;
    VectorXd dx;
  };
  const auto eval = [&](const Vector3d& xi, const VectorXd& xs, double ts) {
    const Eigen::Matrix3d Rs = R * gndi::exp_so3(xi);
    const Vector3d w = omega_of(Rs, xs, ts);
    Stage s;
    s.dxi = w + 0.5 * xi.cross(w) + (1.0 / 12.0) * xi.cross(xi.cross(w));
    s.dx = xdot_of(Rs, xs, ts);
    return s;
  };
  const Stage k1 = eval(Vector3d::Zero(), x, t);
  const Stage k2 = eval(0.5 * dt * k1.dxi, x + 0.5 * dt * k1.dx, t + 0.5 * dt);
  const Stage k3 = eval(0.5 * dt * k2.dxi, x + 0.5 * dt * k2.dx, t + 0.5 * dt);
  const Stage k4 = eval(dt * k3.dxi, x + dt * k3.dx, t + dt);
  const Vector3d xi =
      (dt / 6.0) * (k1.dxi + 2.0 * k2.dxi + 2.0 * k3.dxi + k4.dxi);
  x += (dt / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
  R = R * gndi::exp_so3(xi);
}

/// Truncated-series matrix exponential. Terms are added until they fall
/// below 1e-300 or 60 terms are reached; for inputs with norm <= pi the
/// truncation error is far below double roundoff. Independent of any
/// closed-form rotation formula.
inline Eigen::MatrixXd expm_taylor(const Eigen::MatrixXd& M) {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(M.rows(), M.cols());
  Eigen::MatrixXd term = sum;
  for (int k = 1; k <= 60; ++k) {
    term = term * M / static_cast<double>(k);
    sum += term;
    if (term.norm() < 1e-300) break;
  }
  return sum;
}

/// Haar-uniform random rotation from a normalized Gaussian quaternion.
inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Quaterniond q(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
  q.normalize();
  return q.toRotationMatrix();
}

inline Eigen::Vector3d random_vec3(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  return {gauss(rng), gauss(rng), gauss(rng)};
}

/// Dense random symmetric matrix with entries in [-scale, scale].
inline Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::uniform_real_distribution<double> uni(-scale, scale);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = uni(rng);
  return 0.5 * (m + m.transpose());
}

/// Evaluate a polynomial sum c[k] x^k at a complex point.
inline std::complex<double> polyval(const std::vector<double>& c, std::complex<double> x) {
  std::complex<double> acc(0.0, 0.0);
  for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) acc = acc * x + c[k];
  return acc;
}

}  // namespace testsup
