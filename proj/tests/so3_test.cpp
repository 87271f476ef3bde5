#include "gndi/so3.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "support.hpp"

using gndi::Mat3;
using gndi::Vec3;

TEST(So3, HatMatchesCrossProduct) {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 200; ++i) {
    const Vec3 x = testsup::random_vec3(rng, 3.0);
    const Vec3 y = testsup::random_vec3(rng, 3.0);
    EXPECT_LT((gndi::hat(x) * y - x.cross(y)).norm(), 1e-14);
  }
}

TEST(So3, VeeInvertsHat) {
  std::mt19937_64 rng(102);
  for (int i = 0; i < 200; ++i) {
    const Vec3 x = testsup::random_vec3(rng, 10.0);
    EXPECT_EQ(gndi::vee(gndi::hat(x)), x);  // exact: entries are copied
  }
}

TEST(So3, VeeRejectsNonSkewInput) {
  Mat3 m = Mat3::Zero();
  m(0, 1) = 1e-6;  // symmetric part well above the guard threshold
  EXPECT_THROW(gndi::vee(m), std::invalid_argument);
  EXPECT_NO_THROW(gndi::vee(Mat3::Zero()));
}

TEST(So3, HatTraceIdentity) {
  // trace(A hat(x)) = -x . vee(A - A^T)
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    Mat3 a;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) a(r, c) = uni(rng);
    const Vec3 x = testsup::random_vec3(rng, 2.0);
    const double lhs = (a * gndi::hat(x)).trace();
    const double rhs = -x.dot(gndi::vee(a - a.transpose()));
    EXPECT_NEAR(lhs, rhs, 1e-12);
  }
}

TEST(So3, HatCongruenceIdentity) {
  // hat(x) A + A^T hat(x) = hat((trace(A) I - A) x)
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    Mat3 a;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) a(r, c) = uni(rng);
    const Vec3 x = testsup::random_vec3(rng, 2.0);
    const Mat3 lhs = gndi::hat(x) * a + a.transpose() * gndi::hat(x);
    const Mat3 rhs = gndi::hat((a.trace() * Mat3::Identity() - a) * x);
    EXPECT_LT((lhs - rhs).norm(), 1e-12);
  }
}

TEST(So3, RotationConjugationIdentity) {
  // R hat(x) R^T = hat(R x)
  std::mt19937_64 rng(105);
  for (int i = 0; i < 200; ++i) {
    const Mat3 r = testsup::random_rotation(rng);
    const Vec3 x = testsup::random_vec3(rng, 3.0);
    EXPECT_LT((r * gndi::hat(x) * r.transpose() - gndi::hat(r * x)).norm(), 1e-13);
  }
}

TEST(So3, ExpMatchesTruncatedSeries) {
  std::mt19937_64 rng(106);
  std::uniform_real_distribution<double> uni(0.0, M_PI);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 axis = testsup::random_vec3(rng).normalized();
    const Vec3 v = uni(rng) * axis;
    const Mat3 expected = testsup::expm_taylor(gndi::hat(v));
    EXPECT_LT((gndi::exp_so3(v) - expected).norm(), 1e-12);
  }
}

TEST(So3, ExpSmallAngleBranchAgreesAcrossSwitch) {
  std::mt19937_64 rng(107);
  for (double mag : {1e-9, 1e-7, 9.9e-7, 1.01e-6, 1e-5}) {
    for (int i = 0; i < 20; ++i) {
      const Vec3 v = mag * testsup::random_vec3(rng).normalized();
      const Mat3 expected = testsup::expm_taylor(gndi::hat(v));
      EXPECT_LT((gndi::exp_so3(v) - expected).norm(), 1e-15);
    }
  }
  EXPECT_LT((gndi::exp_so3(Vec3::Zero()) - Mat3::Identity()).norm(), 0.0 + 1e-300);
}

TEST(So3, ExpProducesRotations) {
  std::mt19937_64 rng(108);
  std::uniform_real_distribution<double> uni(0.0, M_PI);
  for (int i = 0; i < 300; ++i) {
    const Vec3 v = uni(rng) * testsup::random_vec3(rng).normalized();
    EXPECT_TRUE(gndi::is_rotation(gndi::exp_so3(v), 1e-12));
  }
}

TEST(So3, LogInvertsExpInsideInjectivityRadius) {
  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> uni(1e-8, M_PI - 1e-6);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 v = uni(rng) * testsup::random_vec3(rng).normalized();
    EXPECT_LT((gndi::log_so3(gndi::exp_so3(v)) - v).norm(), 1e-9);
  }
}

TEST(So3, ExpLogRoundTripOnHaarRotations) {
  std::mt19937_64 rng(110);
  for (int i = 0; i < 1000; ++i) {
    const Mat3 r = testsup::random_rotation(rng);
    const Vec3 v = gndi::log_so3(r);
    EXPECT_LE(v.norm(), M_PI + 1e-12);
    EXPECT_LT((gndi::exp_so3(v) - r).norm(), 1e-9);
  }
}

TEST(So3, LogHandlesHalfTurnsWithConsistentSign) {
  std::mt19937_64 rng(111);
  for (int i = 0; i < 200; ++i) {
    const Vec3 axis = testsup::random_vec3(rng).normalized();
    const Mat3 r = gndi::exp_so3(M_PI * axis);
    const Vec3 v = gndi::log_so3(r);
    EXPECT_NEAR(v.norm(), M_PI, 1e-9);
    // Axis recovered up to overall sign, resolved deterministically.
    EXPECT_LT(std::min((v - M_PI * axis).norm(), (v + M_PI * axis).norm()), 1e-7);
    int first_nonzero = 0;
    while (first_nonzero < 2 && v(first_nonzero) == 0.0) ++first_nonzero;
    EXPECT_GT(v(first_nonzero), 0.0);
    EXPECT_LT((gndi::exp_so3(v) - r).norm(), 1e-9);
  }
  // Canonical axis-aligned half turns.
  const Mat3 rx = Eigen::DiagonalMatrix<double, 3>(1.0, -1.0, -1.0).toDenseMatrix();
  EXPECT_LT((gndi::log_so3(rx) - Vec3(M_PI, 0.0, 0.0)).norm(), 1e-12);
  const Mat3 rz = Eigen::DiagonalMatrix<double, 3>(-1.0, -1.0, 1.0).toDenseMatrix();
  EXPECT_LT((gndi::log_so3(rz) - Vec3(0.0, 0.0, M_PI)).norm(), 1e-12);
}

TEST(So3, ConfigErrorEqualsQuarterChordalDistance) {
  std::mt19937_64 rng(112);
  for (int i = 0; i < 300; ++i) {
    const Mat3 rd = testsup::random_rotation(rng);
    const Mat3 r = testsup::random_rotation(rng);
    const double psi = gndi::config_error(rd, r);
    const double chordal = (Mat3::Identity() - rd.transpose() * r).squaredNorm();
    EXPECT_NEAR(psi, 0.25 * chordal, 1e-12);
    EXPECT_GE(psi, 0.0);
    EXPECT_LE(psi, 2.0 + 1e-12);
  }
  EXPECT_DOUBLE_EQ(gndi::config_error(Mat3::Identity(), Mat3::Identity()), 0.0);
}

TEST(So3, ConfigErrorDominatesHalfSquaredErrorVector) {
  std::mt19937_64 rng(113);
  for (int i = 0; i < 300; ++i) {
    const Mat3 re = gndi::attitude_error(testsup::random_rotation(rng),
                                         testsup::random_rotation(rng));
    const Vec3 er = gndi::attitude_error_vector(re);
    EXPECT_LE(er.norm(), 1.0 + 1e-12);
    const double psi = 0.5 * (3.0 - re.trace());
    EXPECT_GE(psi, 0.5 * er.squaredNorm() - 1e-12);
  }
}

TEST(So3, ConfigErrorRateEqualsErrorVectorInnerProduct) {
  // d/dt Psi along R_e exp(t hat(w_e)) at t = 0 equals e_R . w_e.
  std::mt19937_64 rng(114);
  for (int i = 0; i < 100; ++i) {
    const Mat3 re = gndi::attitude_error(testsup::random_rotation(rng),
                                         testsup::random_rotation(rng));
    const Vec3 we = testsup::random_vec3(rng, 2.0);
    const double h = 1e-6;
    auto psi_of = [&](double t) {
      const Mat3 m = re * gndi::exp_so3(t * we);
      return 0.5 * (3.0 - m.trace());
    };
    const double ddt = (psi_of(h) - psi_of(-h)) / (2.0 * h);
    EXPECT_NEAR(ddt, gndi::attitude_error_vector(re).dot(we), 1e-8);
  }
}

TEST(So3, ErrorJacobianMatchesErrorVectorDerivative) {
  // d/dt e_R(R_e exp(t hat(w_e))) at t = 0 equals E(R_e) w_e.
  std::mt19937_64 rng(115);
  for (int i = 0; i < 100; ++i) {
    const Mat3 re = testsup::random_rotation(rng);
    const Vec3 we = testsup::random_vec3(rng, 2.0);
    const double h = 1e-6;
    const Vec3 plus = gndi::attitude_error_vector(re * gndi::exp_so3(h * we));
    const Vec3 minus = gndi::attitude_error_vector(re * gndi::exp_so3(-h * we));
    const Vec3 ddt = (plus - minus) / (2.0 * h);
    EXPECT_LT((ddt - gndi::error_jacobian(re) * we).norm(), 1e-8);
  }
}

TEST(So3, ErrorJacobianSymmetricPartBoundedByIdentity) {
  std::mt19937_64 rng(116);
  for (int i = 0; i < 300; ++i) {
    const Mat3 e = gndi::error_jacobian(testsup::random_rotation(rng));
    const Mat3 m = e + e.transpose() - 2.0 * Mat3::Identity();
    Eigen::SelfAdjointEigenSolver<Mat3> es(m);
    EXPECT_LE(es.eigenvalues().maxCoeff(), 1e-10);
  }
}

TEST(So3, AngularVelocityErrorTransportsDesiredRate) {
  std::mt19937_64 rng(117);
  for (int i = 0; i < 100; ++i) {
    const Mat3 rd = testsup::random_rotation(rng);
    const Mat3 r = testsup::random_rotation(rng);
    const Vec3 w = testsup::random_vec3(rng, 3.0);
    const Vec3 wd = testsup::random_vec3(rng, 3.0);
    const Mat3 re = gndi::attitude_error(rd, r);
    const Vec3 we = gndi::angular_velocity_error(w, re, wd);
    EXPECT_LT((we - (w - re.transpose() * wd)).norm(), 1e-14);
  }
  // Coincident frames: the error reduces to a plain difference.
  const Mat3 i3 = Mat3::Identity();
  EXPECT_LT((gndi::angular_velocity_error(Vec3(1, 2, 3), i3, Vec3(0.5, 0, -1)) -
             Vec3(0.5, 2, 4))
                .norm(),
            1e-15);
}

TEST(So3, ProjectRescalesScaledRotation) {
  std::mt19937_64 rng(118);
  for (int i = 0; i < 100; ++i) {
    const Mat3 r = testsup::random_rotation(rng);
    EXPECT_LT((gndi::project_to_so3(1.5 * r) - r).norm(), 1e-12);
  }
}

TEST(So3, ProjectIsIdempotentAndRepairsDrift) {
  std::mt19937_64 rng(119);
  std::uniform_real_distribution<double> uni(-1e-3, 1e-3);
  for (int i = 0; i < 100; ++i) {
    Mat3 m = testsup::random_rotation(rng);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) += uni(rng);
    const Mat3 p = gndi::project_to_so3(m);
    EXPECT_TRUE(gndi::is_rotation(p, 1e-12));
    EXPECT_LT((gndi::project_to_so3(p) - p).norm(), 1e-13);
    EXPECT_LT((p - m).norm(), 1e-2);
  }
}

TEST(So3, ProjectReturnsNearestRotation) {
  std::mt19937_64 rng(120);
  std::uniform_real_distribution<double> uni(-0.2, 0.2);
  for (int i = 0; i < 50; ++i) {
    Mat3 m = testsup::random_rotation(rng);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) += uni(rng);
    if (m.determinant() <= 0.0) continue;
    const Mat3 p = gndi::project_to_so3(m);
    const double best = (m - p).norm();
    for (int j = 0; j < 50; ++j) {
      EXPECT_LE(best, (m - testsup::random_rotation(rng)).norm() + 1e-12);
    }
  }
}

TEST(So3, ProjectRejectsOrientationReversingInput) {
  Mat3 m = Mat3::Identity();
  m(2, 2) = -1.0;
  EXPECT_THROW(gndi::project_to_so3(m), std::invalid_argument);
  EXPECT_THROW(gndi::project_to_so3(Mat3::Zero()), std::invalid_argument);
}

TEST(So3, IsRotationFlagsDefects) {
  EXPECT_TRUE(gndi::is_rotation(Mat3::Identity()));
  Mat3 m = Mat3::Identity();
  m(0, 0) = -1.0;  // orthogonal but orientation-reversing
  EXPECT_FALSE(gndi::is_rotation(m));
  EXPECT_FALSE(gndi::is_rotation(1.0000001 * Mat3::Identity()));
}

// Constant body rate: the chart coordinate is xi(t) = t*omega exactly, so
// the chart velocity must return omega unchanged for parallel arguments.
TEST(So3, InverseDexpIsIdentityOnParallelArguments) {
  const Vec3 w(0.3, -1.1, 0.7);
  EXPECT_LT((gndi::inverse_dexp(0.0 * w, w) - w).norm(), 1e-15);
  EXPECT_LT((gndi::inverse_dexp(2.5 * w, w) - w).norm(), 1e-12);
}

// Defining property of the chart velocity, checked by one short group
// step: exp((xi + h xi_dot)^) = exp(xi^) exp(h omega^) + O(h^2). Both
// the Taylor branch (tiny xi) and the closed form (up to 3 rad) must
// satisfy it with a second-order-small defect.
TEST(So3, InverseDexpMatchesGroupComposition) {
  std::mt19937_64 rng(41);
  const double h = 1e-5;
  for (double angle : {1e-6, 1e-5, 0.5, 1.5, 2.4, 3.0}) {
    const Vec3 xi = angle * testsup::random_vec3(rng).normalized();
    const Vec3 w = testsup::random_vec3(rng);
    const Vec3 xidot = gndi::inverse_dexp(xi, w);
    const Mat3 stepped = gndi::exp_so3(xi + h * xidot);
    const Mat3 composed = gndi::exp_so3(xi) * gndi::exp_so3(h * w);
    EXPECT_LT((stepped - composed).norm(), 50.0 * h * h) << "angle " << angle;
  }
}

// Integrating the chart ODE against a time-varying body rate with a known
// closed-form trajectory: R(t) = exp(t a^) exp(t b^) has body velocity
// omega(t) = exp(-t b^) a + b. Fourth-order integration of xi must land on
// the closed form.
TEST(So3, InverseDexpReproducesNonabelianFlow) {
  const Vec3 a(0.9, -0.3, 0.5);
  const Vec3 b(-0.4, 0.8, 0.2);
  const auto omega_at = [&](double t) -> Vec3 {
    return gndi::exp_so3(-t * b) * a + b;
  };
  Vec3 xi = Vec3::Zero();
  const double T = 1.2, dt = 1e-3;
  const int n = static_cast<int>(T / dt + 0.5);
  for (int k = 0; k < n; ++k) {
    const double t = k * dt;
    const Vec3 k1 = gndi::inverse_dexp(xi, omega_at(t));
    const Vec3 k2 = gndi::inverse_dexp(xi + 0.5 * dt * k1, omega_at(t + 0.5 * dt));
    const Vec3 k3 = gndi::inverse_dexp(xi + 0.5 * dt * k2, omega_at(t + 0.5 * dt));
    const Vec3 k4 = gndi::inverse_dexp(xi + dt * k3, omega_at(t + dt));
    xi += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  const Mat3 closed = gndi::exp_so3(T * a) * gndi::exp_so3(T * b);
  EXPECT_LT((gndi::exp_so3(xi) - closed).norm(), 1e-11);
}
