#include "gndi/lti.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace gndi {

namespace {

void check_dims(const StateSpace& s, const char* who) {
  const auto n = s.A.rows();
  if (s.A.cols() != n || s.B.rows() != n || s.C.cols() != n ||
      s.B.cols() != s.D.cols() || s.C.rows() != s.D.rows()) {
    throw std::invalid_argument(std::string(who) + ": inconsistent block dimensions");
  }
}

}  // namespace

StateSpace make_gain(const Eigen::MatrixXd& K) {
  StateSpace s;
  s.A.resize(0, 0);
  s.B.resize(0, K.cols());
  s.C.resize(K.rows(), 0);
  s.D = K;
  return s;
}

StateSpace make_lead_lag(double kp, double ki, double kd, double eps, double tau_f) {
  if (eps < 0.0) {
    throw std::invalid_argument("make_lead_lag: eps must be >= 0");
  }
  if (kd != 0.0 && tau_f <= 0.0) {
    throw std::invalid_argument("make_lead_lag: tau_f must be > 0 when kd != 0");
  }
  const bool has_i = ki != 0.0;
  const bool has_d = kd != 0.0;
  const int n = (has_i ? 1 : 0) + (has_d ? 1 : 0);

  StateSpace s;
  s.A = Eigen::MatrixXd::Zero(n, n);
  s.B = Eigen::MatrixXd::Zero(n, 1);
  s.C = Eigen::MatrixXd::Zero(1, n);
  s.D = Eigen::MatrixXd::Zero(1, 1);

  // ki/(s + eps):        x1dot = -eps x1 + u,      y1 = ki x1
  // kd s/(tau_f s + 1):  x2dot = -x2/tau_f + u,    y2 = -(kd/tau_f^2) x2 + (kd/tau_f) u
  int idx = 0;
  if (has_i) {
    s.A(idx, idx) = -eps;
    s.B(idx, 0) = 1.0;
    s.C(0, idx) = ki;
    ++idx;
  }
  double feedthrough = kp;
  if (has_d) {
    s.A(idx, idx) = -1.0 / tau_f;
    s.B(idx, 0) = 1.0;
    s.C(0, idx) = -kd / (tau_f * tau_f);
    feedthrough += kd / tau_f;
  }
  s.D(0, 0) = feedthrough;
  return s;
}

StateSpace pade_delay(double T, int order) {
  if (T <= 0.0) {
    throw std::invalid_argument("pade_delay: T must be > 0");
  }
  if (order < 1 || order > 6) {
    throw std::invalid_argument("pade_delay: order must be in [1, 6]");
  }
  const int n = order;

  // e^{-x} ~ N(x)/Dn(x) with coefficients
  //   c_k = n! (2n - k)! / ((2n)! k! (n - k)!),
  // N(x) = sum c_k (-x)^k, Dn(x) = sum c_k x^k. The companion form is
  // built in the normalized variable x = sT, where the coefficient
  // spread stays modest, and the realization is frequency-scaled by
  // 1/T afterwards; substituting T directly into the polynomial makes
  // the companion matrix hopelessly ill-conditioned at high orders.
  auto factorial = [](int m) {
    double f = 1.0;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
  };
  std::vector<double> den(n + 1);  // den[k] multiplies x^k, monic at x^n
  std::vector<double> num(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double c = factorial(n) * factorial(2 * n - k) /
                     (factorial(2 * n) * factorial(k) * factorial(n - k));
    den[k] = c;
    num[k] = c * ((k % 2 == 0) ? 1.0 : -1.0);
  }
  const double lead = den[n];
  for (int k = 0; k <= n; ++k) {
    den[k] /= lead;
    num[k] /= lead;
  }

  StateSpace s;
  s.A = Eigen::MatrixXd::Zero(n, n);
  s.B = Eigen::MatrixXd::Zero(n, 1);
  s.C = Eigen::MatrixXd::Zero(1, n);
  s.D = Eigen::MatrixXd::Zero(1, 1);
  for (int i = 0; i + 1 < n; ++i) s.A(i, i + 1) = 1.0 / T;
  for (int k = 0; k < n; ++k) s.A(n - 1, k) = -den[k] / T;
  s.B(n - 1, 0) = 1.0;
  const double d = num[n];  // = (-1)^n after normalization
  for (int k = 0; k < n; ++k) s.C(0, k) = (num[k] - d * den[k]) / T;
  s.D(0, 0) = d;
  return s;
}

StateSpace lag_filter(double cutoff_hz) {
  if (cutoff_hz <= 0.0) {
    throw std::invalid_argument("lag_filter: cutoff must be > 0");
  }
  const double wc = 2.0 * M_PI * cutoff_hz;
  StateSpace s;
  s.A = Eigen::MatrixXd::Constant(1, 1, -wc);
  s.B = Eigen::MatrixXd::Constant(1, 1, wc);
  s.C = Eigen::MatrixXd::Constant(1, 1, 1.0);
  s.D = Eigen::MatrixXd::Zero(1, 1);
  return s;
}

StateSpace series(const StateSpace& a, const StateSpace& b) {
  check_dims(a, "series");
  check_dims(b, "series");
  if (a.outputs() != b.inputs()) {
    throw std::invalid_argument("series: a.outputs() != b.inputs()");
  }
  const int na = a.states();
  const int nb = b.states();
  StateSpace s;
  s.A = Eigen::MatrixXd::Zero(na + nb, na + nb);
  s.A.topLeftCorner(na, na) = a.A;
  s.A.bottomLeftCorner(nb, na) = b.B * a.C;
  s.A.bottomRightCorner(nb, nb) = b.A;
  s.B = Eigen::MatrixXd::Zero(na + nb, a.inputs());
  s.B.topRows(na) = a.B;
  s.B.bottomRows(nb) = b.B * a.D;
  s.C = Eigen::MatrixXd::Zero(b.outputs(), na + nb);
  s.C.leftCols(na) = b.D * a.C;
  s.C.rightCols(nb) = b.C;
  s.D = b.D * a.D;
  return s;
}

StateSpace diagonal(const std::vector<StateSpace>& blocks) {
  int n = 0, m = 0, p = 0;
  for (const auto& b : blocks) {
    check_dims(b, "diagonal");
    n += b.states();
    m += b.inputs();
    p += b.outputs();
  }
  StateSpace s;
  s.A = Eigen::MatrixXd::Zero(n, n);
  s.B = Eigen::MatrixXd::Zero(n, m);
  s.C = Eigen::MatrixXd::Zero(p, n);
  s.D = Eigen::MatrixXd::Zero(p, m);
  int in = 0, im = 0, ip = 0;
  for (const auto& b : blocks) {
    s.A.block(in, in, b.states(), b.states()) = b.A;
    s.B.block(in, im, b.states(), b.inputs()) = b.B;
    s.C.block(ip, in, b.outputs(), b.states()) = b.C;
    s.D.block(ip, im, b.outputs(), b.inputs()) = b.D;
    in += b.states();
    im += b.inputs();
    ip += b.outputs();
  }
  return s;
}

Eigen::VectorXd step(const StateSpace& sys, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& u, double dt) {
  const Eigen::VectorXd bu = sys.B * u;
  const Eigen::VectorXd k1 = sys.A * x + bu;
  const Eigen::VectorXd k2 = sys.A * (x + 0.5 * dt * k1) + bu;
  const Eigen::VectorXd k3 = sys.A * (x + 0.5 * dt * k2) + bu;
  const Eigen::VectorXd k4 = sys.A * (x + dt * k3) + bu;
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Eigen::VectorXd output(const StateSpace& sys, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& u) {
  return sys.C * x + sys.D * u;
}

StabilityReport is_hurwitz(const Eigen::MatrixXd& A) {
  StabilityReport r;
  if (A.rows() == 0) return r;
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, /*computeEigenvectors=*/false);
  r.spectral_abscissa = es.eigenvalues().real().maxCoeff();
  r.hurwitz = r.spectral_abscissa < 0.0;
  return r;
}

Eigen::MatrixXcd transfer_eval(const StateSpace& sys, std::complex<double> s) {
  if (sys.states() == 0) return sys.D.cast<std::complex<double>>();
  Eigen::MatrixXcd m = -sys.A.cast<std::complex<double>>();
  m.diagonal().array() += s;
  // Pole detection by solve residual rather than pivot-ratio rank
  // checks: canonical-form A matrices legitimately span many decades
  // and would trip a relative pivot threshold far from any pole.
  const Eigen::MatrixXcd b = sys.B.cast<std::complex<double>>();
  const Eigen::MatrixXcd x = Eigen::PartialPivLU<Eigen::MatrixXcd>(m).solve(b);
  const double scale = m.norm() * x.norm() + b.norm();
  if (!x.allFinite() || (m * x - b).norm() > 1e-8 * scale) {
    throw std::domain_error("transfer_eval: s is a pole of the system");
  }
  return sys.C.cast<std::complex<double>>() * x + sys.D.cast<std::complex<double>>();
}

std::optional<double> bandwidth(
    const std::function<std::complex<double>(double)>& response, double w_min,
    double w_max) {
  if (!(w_min > 0.0) || !(w_max > w_min)) {
    throw std::invalid_argument("bandwidth: need 0 < w_min < w_max");
  }
  const double target = 1.0 / std::sqrt(2.0);
  const int grid = 600;
  const double ratio = std::log(w_max / w_min);
  double prev_w = w_min;
  double prev_mag = std::abs(response(w_min));
  if (prev_mag < target) return w_min;  // already below at the left edge
  for (int i = 1; i <= grid; ++i) {
    const double w = w_min * std::exp(ratio * i / grid);
    const double mag = std::abs(response(w));
    if (prev_mag >= target && mag < target) {
      double lo = prev_w, hi = w;
      for (int it = 0; it < 80 && (hi - lo) > 1e-9 * hi; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (std::abs(response(mid)) >= target) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    prev_w = w;
    prev_mag = mag;
  }
  return std::nullopt;
}

}  // namespace gndi
