#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace gndi {

/// Minimal continuous-time LTI block xdot = A x + B u, y = C x + D u.
/// A zero-state block (pure gain) has states() == 0 and empty A, B, C.
struct StateSpace {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  Eigen::MatrixXd D;

  int states() const { return static_cast<int>(A.rows()); }
  int inputs() const { return static_cast<int>(D.cols()); }
  int outputs() const { return static_cast<int>(D.rows()); }
};

/// LTI block with the input split in two groups:
/// xdot = A x + B1 u1 + B2 u2, y = C x + D1 u1 + D2 u2.
struct PartitionedStateSpace {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B1;
  Eigen::MatrixXd B2;
  Eigen::MatrixXd C;
  Eigen::MatrixXd D1;
  Eigen::MatrixXd D2;

  int states() const { return static_cast<int>(A.rows()); }
  int outputs() const { return static_cast<int>(C.rows() > 0 ? C.rows() : D1.rows()); }
};

/// Static gain y = K u as a zero-state block.
StateSpace make_gain(const Eigen::MatrixXd& K);

/// SISO lead-lag compensator
///   K(s) = kp + ki / (s + eps) + kd s / (tau_f s + 1)
/// realized minimally: the integral state exists only when ki != 0 and
/// the filtered-derivative state only when kd != 0, so pure gains stay
/// zero-state. Requires eps >= 0, and tau_f > 0 whenever kd != 0.
StateSpace make_lead_lag(double kp, double ki, double kd, double eps, double tau_f);

/// Diagonal [order/order] Pade approximant of a pure delay e^{-sT} in
/// controllable canonical form. Requires T > 0 and 1 <= order <= 6
/// (factorial coefficient growth makes higher orders ill-conditioned).
StateSpace pade_delay(double T, int order);

/// Unit-DC first-order lag y/u = wc / (s + wc) with wc = 2*pi*cutoff_hz.
StateSpace lag_filter(double cutoff_hz);

/// Series interconnection u -> a -> b -> y. Requires a.outputs() == b.inputs().
StateSpace series(const StateSpace& a, const StateSpace& b);

/// Block-diagonal aggregate: inputs and outputs are the concatenation
/// of the blocks' inputs and outputs, with no cross coupling.
StateSpace diagonal(const std::vector<StateSpace>& blocks);

/// One RK4 step of xdot = A x + B u with u held constant over [0, dt].
Eigen::VectorXd step(const StateSpace& sys, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& u, double dt);

/// y = C x + D u.
Eigen::VectorXd output(const StateSpace& sys, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& u);

struct StabilityReport {
  bool hurwitz = true;
  /// max Re(lambda) over eigenvalues of A; -inf for a zero-state block.
  double spectral_abscissa = -std::numeric_limits<double>::infinity();
};

/// Eigenvalue test of the A matrix. Strict: hurwitz iff abscissa < 0.
StabilityReport is_hurwitz(const Eigen::MatrixXd& A);

/// Transfer matrix C (sI - A)^{-1} B + D at one complex frequency.
/// Throws std::domain_error when s is (numerically) a pole.
Eigen::MatrixXcd transfer_eval(const StateSpace& sys, std::complex<double> s);

/// First -3 dB crossing of |H(j w)| for a stable unit-DC-gain scalar
/// response, searched on [w_min, w_max] by log-spaced bracketing plus
/// bisection. Returns nullopt when the magnitude never drops below
/// 1/sqrt(2) on the interval (e.g. a pure gain loop).
std::optional<double> bandwidth(
    const std::function<std::complex<double>(double)>& response, double w_min,
    double w_max);

}  // namespace gndi
