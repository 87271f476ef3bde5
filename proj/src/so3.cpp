#include "gndi/so3.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

namespace gndi {

Mat3 hat(const Vec3& v) {
  Mat3 S;
  S << 0.0, -v.z(), v.y(),
      v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return S;
}

Vec3 vee(const Mat3& S) {
  const Mat3 sym = 0.5 * (S + S.transpose());
  if (sym.norm() > 1e-9) {
    throw std::invalid_argument("vee: input is not skew-symmetric");
  }
  return Vec3(S(2, 1), S(0, 2), S(1, 0));
}

bool is_rotation(const Mat3& R, double tol) {
  const Mat3 defect = R.transpose() * R - Mat3::Identity();
  return defect.norm() <= tol && R.determinant() > 0.0;
}

Mat3 exp_so3(const Vec3& v) {
  const double theta = v.norm();
  const double theta2 = theta * theta;
  double a;  // sin(theta)/theta
  double b;  // (1 - cos(theta))/theta^2
  if (theta < 1e-6) {
    a = 1.0 - theta2 / 6.0;
    b = 0.5 - theta2 / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  const Mat3 S = hat(v);
  return Mat3::Identity() + a * S + b * S * S;
}

Vec3 log_so3(const Mat3& R) {
  // Angle from atan2 of the skew-part magnitude against the trace:
  // well conditioned over the whole of [0, pi], unlike acos alone.
  const Vec3 skew =
      0.5 * Vec3(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  const double sin_theta = skew.norm();
  const double cos_theta = 0.5 * (R.trace() - 1.0);
  const double theta = std::atan2(sin_theta, cos_theta);

  if (theta < 1e-8) {
    return skew;  // theta/sin(theta) = 1 to working precision
  }

  if (M_PI - theta > 1e-5) {
    return (theta / sin_theta) * skew;
  }

  // Near a half turn the skew part no longer resolves the axis, so
  // recover it from the symmetric part, where the angle defect enters
  // only at second order, via the dominant diagonal entry.
  const Mat3 B = 0.25 * (R + R.transpose()) + 0.5 * Mat3::Identity();
  int k = 0;
  B.diagonal().maxCoeff(&k);
  Vec3 s;
  s(k) = std::sqrt(std::max(B(k, k), 0.0));
  const int i = (k + 1) % 3;
  const int j = (k + 2) % 3;
  s(i) = B(k, i) / s(k);
  s(j) = B(k, j) / s(k);
  s.normalize();
  if (sin_theta > 1e-12) {
    // The skew part still carries the sign of the axis.
    if (s.dot(skew) < 0.0) s = -s;
  } else {
    // Genuine half turn: +/- axis give the same rotation. Fix the sign
    // deterministically: first nonzero component positive.
    for (int c = 0; c < 3; ++c) {
      if (s(c) != 0.0) {
        if (s(c) < 0.0) s = -s;
        break;
      }
    }
  }
  return theta * s;
}

Mat3 attitude_error(const Mat3& R_d, const Mat3& R) {
  return R_d.transpose() * R;
}

double config_error(const Mat3& R_d, const Mat3& R) {
  return 0.5 * (3.0 - (R_d.transpose() * R).trace());
}

Vec3 attitude_error_vector(const Mat3& R_e) {
  return 0.5 * Vec3(R_e(2, 1) - R_e(1, 2), R_e(0, 2) - R_e(2, 0), R_e(1, 0) - R_e(0, 1));
}

Mat3 error_jacobian(const Mat3& R_e) {
  return 0.5 * (R_e.trace() * Mat3::Identity() - R_e.transpose());
}

Vec3 angular_velocity_error(const Vec3& omega, const Mat3& R_e, const Vec3& omega_d) {
  return omega - R_e.transpose() * omega_d;
}

Mat3 project_to_so3(const Mat3& M) {
  if (M.determinant() <= 0.0) {
    throw std::invalid_argument("project_to_so3: determinant is not positive");
  }
  Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

Vec3 inverse_dexp(const Vec3& xi, const Vec3& omega) {
  const double a = xi.norm();
  double gamma;
  if (a < 1e-4) {
    gamma = 1.0 / 12.0 + a * a / 720.0;
  } else {
    gamma = 1.0 / (a * a) - (1.0 + std::cos(a)) / (2.0 * a * std::sin(a));
  }
  return omega + 0.5 * xi.cross(omega) + gamma * xi.cross(xi.cross(omega));
}

}  // namespace gndi
