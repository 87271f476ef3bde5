#include "gndi/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "gndi/actuation.hpp"
#include "gndi/controllers.hpp"
#include "gndi/plant.hpp"
#include "gndi/reference.hpp"

namespace gndi {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Everything a derivative evaluation needs besides the state vector.
/// Controller structs are used for their realizations only; the states
/// they carry are ignored in favor of slices of the packed vector.
struct Loop {
  const ScenarioConfig* cfg = nullptr;
  PlantParams params;
  bool flips = false;
  bool euler = false;
  AttitudeController att;
  EulerBaselineController eb;
  RateController rc;
  SensorModel sm;
  bool sensor_on = false;
  bool act_on = false;
  EffectivenessMatrix B = EffectivenessMatrix::Zero();
  Eigen::Matrix<double, kRotorCount, 4> alloc =
      Eigen::Matrix<double, kRotorCount, 4>::Zero();
  double hover_thrust = 0.0;
  double u_lo = 0.0, u_hi = 0.0;  // squared-speed band
  double tau_m = 1.0;

  // packed-state layout: [xi_ref(3) omega_d(3) xi(3) omega(3) x_att x_sens x_rate u_m]
  int n_att = 0, n_sens = 0, n_rate = 0, n_mot = 0;
  int o_att = 12, o_sens = 0, o_rate = 0, o_mot = 0, N = 0;

  // chart base points, rebased after every committed step
  Mat3 Rd0 = Mat3::Identity();
  Mat3 R0 = Mat3::Identity();
};

struct StageOut {
  double psi = 0.0;
  Vec3 e_R = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
  Vec3 omega_d = Vec3::Zero();
  Vec3 tau_dem = Vec3::Zero();
  Vec3 tau_app = Vec3::Zero();
  bool saturated = false;
};

Loop build_loop(const ScenarioConfig& cfg) {
  Loop L;
  L.cfg = &cfg;
  L.params = scenario_plant(cfg);
  L.flips = cfg.maneuver == ManeuverType::Flips;
  L.euler = cfg.controller == ControllerType::EulerBaseline;

  const StateSpace K_R = attitude_compensator(cfg);
  if (L.euler)
    L.eb = make_euler_baseline(K_R, cfg.feedforward);
  else
    L.att = make_attitude_controller(K_R, cfg.feedforward);
  L.rc = make_rate_controller(rate_compensator(cfg), L.params);

  L.sensor_on = cfg.sensor_enabled;
  if (L.sensor_on)
    L.sm = make_delay_lag_sensor(cfg.sensor_delay, cfg.pade_order, cfg.lag_cutoff_hz);

  L.act_on = cfg.actuation_enabled;
  if (L.act_on) {
    const RotorGeometry g = hex_geometry(cfg.arm_length, cfg.k_f, cfg.k_m);
    L.B = effectiveness_matrix(g);
    allocate(Vec3::Zero(), 1.0, L.B);  // rank check; throws when degenerate
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        L.B, Eigen::ComputeThinU | Eigen::ComputeThinV);
    L.alloc = svd.matrixV() * svd.singularValues().cwiseInverse().asDiagonal() *
              svd.matrixU().transpose();
    L.hover_thrust = cfg.mass * cfg.gravity;
    L.u_lo = cfg.speed_min * cfg.speed_min;
    L.u_hi = cfg.speed_max * cfg.speed_max;
    L.tau_m = cfg.motor_time_constant;
  }

  L.n_att = K_R.states();
  L.n_sens = L.sensor_on ? L.sm.blocks.states() : 0;
  L.n_rate = L.rc.law.states();
  L.n_mot = L.act_on ? kRotorCount : 0;
  L.o_att = 12;
  L.o_sens = L.o_att + L.n_att;
  L.o_rate = L.o_sens + L.n_sens;
  L.o_mot = L.o_rate + L.n_rate;
  L.N = L.o_mot + L.n_mot;
  return L;
}

/// Time derivative of the packed state; optionally reports the signals
/// a log row needs, evaluated at this same (t, y).
Eigen::VectorXd eval(const Loop& L, double t, const Eigen::VectorXd& y, StageOut* out) {
  Eigen::VectorXd dy = Eigen::VectorXd::Zero(L.N);

  Mat3 R_d = Mat3::Identity();
  Vec3 omega_d = Vec3::Zero();
  Vec3 omega_d_dot = Vec3::Zero();
  if (L.flips) {
    const Vec3 xi_ref = y.segment<3>(0);
    omega_d = y.segment<3>(3);
    R_d = L.Rd0 * exp_so3(xi_ref);
    const Mat3 target = flip_sequence_target(t);
    omega_d_dot = filter_acceleration(R_d, omega_d, target, L.cfg->filter_natural_frequency,
                                      L.cfg->filter_damping_ratio);
    dy.segment<3>(0) = inverse_dexp(xi_ref, omega_d);
    dy.segment<3>(3) = omega_d_dot;
  }

  const Vec3 xi = y.segment<3>(6);
  const Vec3 omega = y.segment<3>(9);
  const Mat3 R = L.R0 * exp_so3(xi);
  const Mat3 R_e = attitude_error(R_d, R);
  const Vec3 e_R = attitude_error_vector(R_e);
  const Vec3 omega_e = angular_velocity_error(omega, R_e, omega_d);

  const Eigen::VectorXd x_att = y.segment(L.o_att, L.n_att);
  Vec3 omega_cmd;
  bool sat = false;
  if (L.euler) {
    omega_cmd = euler_baseline_output(L.eb, x_att, R_d, R, omega_d, &sat);
    dy.segment(L.o_att, L.n_att) =
        L.eb.law.A * x_att + L.eb.law.B * euler_attitude_error(R_d, R);
  } else {
    omega_cmd = attitude_ndi_output(L.att, x_att, R_d, R, omega_d);
    dy.segment(L.o_att, L.n_att) = L.att.law.A * x_att + L.att.law.B * e_R;
  }

  Vec3 omega_meas = omega;
  if (L.sensor_on) {
    const Eigen::VectorXd x_s = y.segment(L.o_sens, L.n_sens);
    omega_meas = L.sm.blocks.C * x_s + L.sm.blocks.D * omega;
    dy.segment(L.o_sens, L.n_sens) = L.sm.blocks.A * x_s + L.sm.blocks.B * omega;
  }

  Vec3 accel_ff = Vec3::Zero();
  if (!L.euler && L.cfg->feedforward)
    accel_ff = tracking_cancellation(R_e, omega_e, omega_d, omega_d_dot);

  const Eigen::VectorXd x_r = y.segment(L.o_rate, L.n_rate);
  const Vec3 tau_dem = rate_ndi_output(L.rc, x_r, omega_meas, omega_cmd, accel_ff);
  dy.segment(L.o_rate, L.n_rate) =
      L.rc.law.A * x_r + L.rc.law.B1 * omega_meas + L.rc.law.B2 * omega_cmd;

  Vec3 tau_app = tau_dem;
  if (L.act_on) {
    const RotorVector u = y.segment<kRotorCount>(L.o_mot);
    Eigen::Vector4d wrench_cmd;
    wrench_cmd << L.hover_thrust, tau_dem;
    RotorVector u_cmd = L.alloc * wrench_cmd;
    for (int i = 0; i < kRotorCount; ++i) u_cmd(i) = std::clamp(u_cmd(i), L.u_lo, L.u_hi);
    dy.segment<kRotorCount>(L.o_mot) = (u_cmd - u) / L.tau_m;
    tau_app = (L.B * u).tail<3>();
  }

  dy.segment<3>(9) = body_derivative({R, omega}, tau_app, L.params);
  dy.segment<3>(6) = inverse_dexp(xi, omega);

  if (out) {
    out->psi = config_error(R_d, R);
    out->e_R = e_R;
    out->omega = omega;
    out->omega_d = omega_d;
    out->tau_dem = tau_dem;
    out->tau_app = tau_app;
    out->saturated = sat;
  }
  return dy;
}

TimeSeriesRow make_row(double t, const StageOut& o) {
  TimeSeriesRow r;
  r.t = t;
  r.psi = o.psi;
  r.e_R = o.e_R;
  r.omega = o.omega;
  r.omega_d = o.omega_d;
  r.tau_dem = o.tau_dem;
  r.tau_app = o.tau_app;
  return r;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

const char* yesno(bool b) { return b ? "yes" : "no"; }

}  // namespace

SimResult simulate(const ScenarioConfig& cfg) {
  validate_scenario(cfg);
  Loop L = build_loop(cfg);

  Eigen::VectorXd y = Eigen::VectorXd::Zero(L.N);
  L.R0 = scenario_initial_attitude(cfg);
  y.segment<3>(9) = cfg.initial_rate;
  if (L.act_on) {
    Eigen::Vector4d hover;
    hover << L.hover_thrust, 0.0, 0.0, 0.0;
    RotorVector u0 = L.alloc * hover;
    for (int i = 0; i < kRotorCount; ++i) u0(i) = std::clamp(u0(i), L.u_lo, L.u_hi);
    y.segment<kRotorCount>(L.o_mot) = u0;
  }

  const double dt = cfg.dt;
  const auto n_steps = static_cast<std::size_t>(std::llround(cfg.duration / dt));

  SimResult res;
  res.summary.name = cfg.name;
  res.rows.reserve(n_steps + 1);

  bool saturated = false;
  double end_time = 0.0;

  StageOut o;
  eval(L, 0.0, y, &o);
  res.rows.push_back(make_row(0.0, o));
  saturated |= o.saturated;

  std::size_t k = 0;
  while (k < n_steps) {
    const double t = static_cast<double>(k) * dt;
    StageOut s1, s2, s3, s4;
    const Eigen::VectorXd k1 = eval(L, t, y, &s1);
    const Eigen::VectorXd k2 = eval(L, t + 0.5 * dt, y + (0.5 * dt) * k1, &s2);
    const Eigen::VectorXd k3 = eval(L, t + 0.5 * dt, y + (0.5 * dt) * k2, &s3);
    const Eigen::VectorXd k4 = eval(L, t + dt, y + dt * k3, &s4);
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    saturated |= s1.saturated || s2.saturated || s3.saturated || s4.saturated;
    ++k;
    const double t_next = static_cast<double>(k) * dt;

    // rebase the charts so per-step coordinates stay small
    L.R0 = L.R0 * exp_so3(y.segment<3>(6));
    y.segment<3>(6).setZero();
    if (L.flips) {
      L.Rd0 = L.Rd0 * exp_so3(y.segment<3>(0));
      y.segment<3>(0).setZero();
    }
    if (k % 1024 == 0) {
      L.R0 = project_to_so3(L.R0);
      if (L.flips) L.Rd0 = project_to_so3(L.Rd0);
    }

    if (!y.allFinite()) {
      res.summary.unstable = true;
      end_time = t_next;
      break;
    }
    eval(L, t_next, y, &o);
    res.rows.push_back(make_row(t_next, o));
    saturated |= o.saturated;
    end_time = t_next;
    if (o.omega.norm() > kOmegaLimit) {
      res.summary.unstable = true;
      break;
    }
  }

  RunSummary& s = res.summary;
  s.kinematic_saturation = saturated;
  s.steps = k;
  s.end_time = end_time;
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const TimeSeriesRow& r = res.rows[i];
    s.peak_psi = std::max(s.peak_psi, r.psi);
    s.peak_e_R = std::max(s.peak_e_R, r.e_R.norm());
    s.peak_tau_dem = std::max(s.peak_tau_dem, r.tau_dem.norm());
    s.peak_tau_app = std::max(s.peak_tau_app, r.tau_app.norm());
    if (i > 0) {
      const TimeSeriesRow& p = res.rows[i - 1];
      s.torque_effort += 0.5 * (p.tau_app.norm() + r.tau_app.norm()) * (r.t - p.t);
    }
  }
  if (!res.rows.empty()) s.final_psi = res.rows.back().psi;
  if (cfg.actuation_enabled && s.peak_tau_dem >= 10.0 * s.peak_tau_app) {
    bool was_tracking = false;
    for (const TimeSeriesRow& r : res.rows) {
      if (r.psi <= 1.0) was_tracking = true;
      if (was_tracking && r.psi >= 1.99) {
        s.saturated_divergence = true;
        break;
      }
    }
  }
  return res;
}

CertificationReport certify(const ScenarioConfig& cfg) {
  validate_scenario(cfg);
  CertificationReport rep;
  const PlantParams params = scenario_plant(cfg);
  const StateSpace K_R = attitude_compensator(cfg);
  const RateController rc = make_rate_controller(rate_compensator(cfg), params);

  // rate loop as flown: measurement dynamics in the feedback path
  PartitionedStateSpace flown = rc.law;
  if (cfg.sensor_enabled)
    flown = with_measurement_filter(
        rc.law,
        make_delay_lag_sensor(cfg.sensor_delay, cfg.pade_order, cfg.lag_cutoff_hz).blocks);
  const int n = flown.states();
  Eigen::MatrixXd Acl(3 + n, 3 + n);
  Acl.topLeftCorner(3, 3) = flown.D1;
  Acl.topRightCorner(3, n) = flown.C;
  Acl.bottomLeftCorner(n, 3) = flown.B1;
  Acl.bottomRightCorner(n, n) = flown.A;
  const StabilityReport st = is_hurwitz(Acl);
  rep.rate_loop_hurwitz = st.hurwitz;
  rep.rate_loop_abscissa = st.spectral_abscissa;

  const auto certify_problem = [](const LmiProblem& p) {
    LoopCertificate c;
    const SolveResult r = solve_feasibility(p);
    c.status = r.status;
    c.solver_margin = r.margins.min_normalized;
    c.newton_iterations = r.newton_iterations;
    if (r.status == SolveStatus::Feasible)
      c.verified_margin = verify_certificate(p, r.certificate).min_normalized;
    return c;
  };
  rep.attitude = certify_problem(build_attitude_lmi(K_R));
  rep.cascade = certify_problem(build_cascade_lmis(build_cascade_matrices(K_R, rc.law)));

  // per-axis closed-loop bandwidths; channels share one realization, so
  // evaluate the scalar blocks directly
  const ChannelGains& rg = cfg.rate_gains;
  const ChannelGains& ag = cfg.attitude_gains;
  const StateSpace kw1 = make_lead_lag(rg.kp, rg.ki, rg.kd, rg.eps, rg.tau_f);
  const StateSpace kr1 = make_lead_lag(ag.kp, ag.ki, ag.kd, ag.eps, ag.tau_f);
  StateSpace sens1 = make_gain(Eigen::MatrixXd::Identity(1, 1));
  if (cfg.sensor_enabled)
    sens1 = series(pade_delay(cfg.sensor_delay, cfg.pade_order), lag_filter(cfg.lag_cutoff_hz));
  const auto rate_resp = [&](double w) {
    const std::complex<double> s(0.0, w);
    const std::complex<double> K = transfer_eval(kw1, s)(0, 0);
    const std::complex<double> S = transfer_eval(sens1, s)(0, 0);
    return K / (s + K * S);
  };
  const auto att_resp = [&](double w) {
    const std::complex<double> s(0.0, w);
    const std::complex<double> G = -transfer_eval(kr1, s)(0, 0);
    return G / (s + G);
  };
  const auto rb = bandwidth(rate_resp, 1e-3, 1e6);
  const auto ab = bandwidth(att_resp, 1e-3, 1e6);
  for (int a = 0; a < 3; ++a) {
    rep.rate_bandwidth(a) = rb.value_or(kNaN);
    rep.attitude_bandwidth(a) = ab.value_or(kNaN);
    rep.bandwidth_ratio(a) = rep.attitude_bandwidth(a) / rep.rate_bandwidth(a);
  }
  return rep;
}

SimResult run_scenario(const ScenarioConfig& cfg) {
  SimResult res = simulate(cfg);
  attach_analysis(res.summary, certify(cfg));
  return res;
}

void attach_analysis(RunSummary& summary, const CertificationReport& rep) {
  summary.analysis_present = true;
  summary.rate_loop_hurwitz = rep.rate_loop_hurwitz;
  summary.attitude_lmi = rep.attitude.status;
  summary.cascade_lmi = rep.cascade.status;
  summary.bandwidth_ratio = rep.bandwidth_ratio;
}

void write_timeseries_csv(std::ostream& os, const std::vector<TimeSeriesRow>& rows) {
  os << "# gndi-timeseries v1\n";
  os << "t,psi,eR_x,eR_y,eR_z,omega_x,omega_y,omega_z,"
        "omegad_x,omegad_y,omegad_z,tau_dem_x,tau_dem_y,tau_dem_z,"
        "tau_app_x,tau_app_y,tau_app_z\n";
  char buf[32];
  const auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf << sep;
  };
  for (const TimeSeriesRow& r : rows) {
    put(r.t, ',');
    put(r.psi, ',');
    for (int i = 0; i < 3; ++i) put(r.e_R(i), ',');
    for (int i = 0; i < 3; ++i) put(r.omega(i), ',');
    for (int i = 0; i < 3; ++i) put(r.omega_d(i), ',');
    for (int i = 0; i < 3; ++i) put(r.tau_dem(i), ',');
    for (int i = 0; i < 3; ++i) put(r.tau_app(i), i == 2 ? '\n' : ',');
  }
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Feasible:
      return "feasible";
    case SolveStatus::Infeasible:
      return "infeasible";
    default:
      return "indeterminate";
  }
}

std::string format_summary(const RunSummary& s) {
  std::string out;
  out += "scenario: " + s.name + "\n";
  out += "steps: " + std::to_string(s.steps) + "\n";
  out += "end_time_s: " + fmt("%.9g", s.end_time) + "\n";
  out += "peak_psi: " + fmt("%.9g", s.peak_psi) + "\n";
  out += "final_psi: " + fmt("%.9g", s.final_psi) + "\n";
  out += "peak_attitude_error: " + fmt("%.9g", s.peak_e_R) + "\n";
  out += "peak_torque_demanded_Nm: " + fmt("%.9g", s.peak_tau_dem) + "\n";
  out += "peak_torque_applied_Nm: " + fmt("%.9g", s.peak_tau_app) + "\n";
  out += "torque_effort_Nms: " + fmt("%.9g", s.torque_effort) + "\n";
  out += std::string("unstable: ") + yesno(s.unstable) + "\n";
  out += std::string("kinematic_saturation: ") + yesno(s.kinematic_saturation) + "\n";
  out += std::string("saturated_divergence: ") + yesno(s.saturated_divergence) + "\n";
  if (s.analysis_present) {
    out += std::string("rate_loop_hurwitz: ") + yesno(s.rate_loop_hurwitz) + "\n";
    out += std::string("attitude_lmi: ") + to_string(s.attitude_lmi) + "\n";
    out += std::string("cascade_lmi: ") + to_string(s.cascade_lmi) + "\n";
    out += "bandwidth_ratio: " + fmt("%.6g", s.bandwidth_ratio(0)) + " " +
           fmt("%.6g", s.bandwidth_ratio(1)) + " " + fmt("%.6g", s.bandwidth_ratio(2)) + "\n";
  }
  return out;
}

std::string format_certification(const CertificationReport& rep) {
  std::string out;
  out += std::string("rate_loop_hurwitz: ") + yesno(rep.rate_loop_hurwitz) +
         " (spectral abscissa " + fmt("%.6g", rep.rate_loop_abscissa) + ")\n";
  const auto loop_line = [&](const char* label, const LoopCertificate& c) {
    out += std::string(label) + ": " + to_string(c.status);
    if (c.status == SolveStatus::Feasible)
      out += " (solver margin " + fmt("%.6g", c.solver_margin) + ", verified " +
             fmt("%.6g", c.verified_margin) + ")";
    out += ", " + std::to_string(c.newton_iterations) + " newton iterations\n";
  };
  loop_line("attitude_lmi", rep.attitude);
  loop_line("cascade_lmi", rep.cascade);
  for (int a = 0; a < 3; ++a) {
    out += "axis " + std::to_string(a) + ": rate_bw " +
           fmt("%.6g", rep.rate_bandwidth(a)) + " rad/s, attitude_bw " +
           fmt("%.6g", rep.attitude_bandwidth(a)) + " rad/s, ratio " +
           fmt("%.6g", rep.bandwidth_ratio(a)) + "\n";
  }
  for (int a = 0; a < 3; ++a) {
    if (!(rep.bandwidth_ratio(a) > 4.0)) {
      out += "warning: attitude/rate bandwidth ratio is not above 4 on axis " +
             std::to_string(a) + "\n";
    }
  }
  return out;
}

std::string format_comparison(const std::vector<RunSummary>& runs) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-24s %12s %12s %12s %12s %12s %9s %9s\n", "scenario",
                "peak_psi", "final_psi", "peak_e_R", "peak_tau", "effort", "unstable", "diverged");
  out += buf;
  for (const RunSummary& s : runs) {
    std::snprintf(buf, sizeof(buf), "%-24s %12.5g %12.5g %12.5g %12.5g %12.5g %9s %9s\n",
                  s.name.c_str(), s.peak_psi, s.final_psi, s.peak_e_R, s.peak_tau_app,
                  s.torque_effort, yesno(s.unstable), yesno(s.saturated_divergence));
    out += buf;
  }
  for (std::size_t i = 1; i < runs.size(); ++i) {
    const double d = runs[i].torque_effort - runs[0].torque_effort;
    std::snprintf(buf, sizeof(buf),
                  "torque effort: %s minus %s = %.5g N m s (%+.3g%% of %s)\n",
                  runs[i].name.c_str(), runs[0].name.c_str(), d,
                  runs[0].torque_effort != 0.0 ? 100.0 * d / runs[0].torque_effort : 0.0,
                  runs[0].name.c_str());
    out += buf;
  }
  return out;
}

}  // namespace gndi
