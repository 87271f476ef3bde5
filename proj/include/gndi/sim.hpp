#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gndi/lmi.hpp"
#include "gndi/scenario.hpp"
#include "gndi/so3.hpp"

namespace gndi {

/// One logged closed-loop sample. tau_dem is the torque the inversion
/// law asked for; tau_app is what the rotors delivered (equal when the
/// actuation chain is disabled).
struct TimeSeriesRow {
  double t = 0.0;
  double psi = 0.0;
  Vec3 e_R = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
  Vec3 omega_d = Vec3::Zero();
  Vec3 tau_dem = Vec3::Zero();
  Vec3 tau_app = Vec3::Zero();
};

/// Outcome of one LMI feasibility solve plus its independent re-check.
/// verified_margin comes from instantiating the certificate and
/// re-measuring eigenvalues, not from solver bookkeeping.
struct LoopCertificate {
  SolveStatus status = SolveStatus::Indeterminate;
  double solver_margin = 0.0;
  double verified_margin = 0.0;
  int newton_iterations = 0;
};

/// Linear-analysis and certification verdicts for one configuration.
/// The rate-loop eigenvalue test includes the measurement dynamics (the
/// loop as flown); the cascade certificate is for the ideal cascade the
/// Lyapunov construction covers, which has no measurement states.
struct CertificationReport {
  bool rate_loop_hurwitz = false;
  double rate_loop_abscissa = 0.0;
  LoopCertificate attitude;
  LoopCertificate cascade;
  Vec3 rate_bandwidth = Vec3::Zero();      // rad/s per axis, NaN if not found
  Vec3 attitude_bandwidth = Vec3::Zero();  // rad/s per axis, NaN if not found
  Vec3 bandwidth_ratio = Vec3::Zero();     // attitude / rate per axis
};

/// Scalar metrics of one run. Peak and integral fields are over the
/// logged rows, so a terminated run reports the partial record. The
/// verdict fields are meaningful only when analysis_present is set
/// (attach_analysis copies them from a CertificationReport).
struct RunSummary {
  std::string name;
  double peak_psi = 0.0;
  double final_psi = 0.0;
  double peak_e_R = 0.0;
  double peak_tau_dem = 0.0;
  double peak_tau_app = 0.0;
  double torque_effort = 0.0;  // trapezoidal integral of |tau_app| over the log
  bool unstable = false;
  bool kinematic_saturation = false;  // baseline inversion hit its angle guard
  // Tracking was fully lost while the rotors ran out of authority: psi rose
  // from at most 1.0 to at least 1.99 (its maximum is 2) and the demanded
  // torque peak exceeded the applied peak tenfold. Only meaningful when the
  // actuation chain is simulated; an ideal-torque run never sets it.
  bool saturated_divergence = false;
  double end_time = 0.0;
  std::size_t steps = 0;

  bool analysis_present = false;
  bool rate_loop_hurwitz = false;
  SolveStatus attitude_lmi = SolveStatus::Indeterminate;
  SolveStatus cascade_lmi = SolveStatus::Indeterminate;
  Vec3 bandwidth_ratio = Vec3::Zero();
};

struct SimResult {
  std::vector<TimeSeriesRow> rows;
  RunSummary summary;
};

/// A run is declared divergent when any state stops being finite or
/// the body rate exceeds this magnitude (rad/s).
inline constexpr double kOmegaLimit = 1e3;

/// Linear stability checks, LMI certificates, and per-axis closed-loop
/// bandwidths for the configured gain set. Verdicts are data: an
/// infeasible or indeterminate certificate is reported, not thrown.
CertificationReport certify(const ScenarioConfig& cfg);

/// Closed-loop run: reference shaping, attitude law, measurement,
/// rate inversion, allocation, motors, rigid body, all advanced by one
/// shared RK4 on a local-chart state. Deterministic for a given config.
/// Divergence terminates the run, sets the flag, and keeps the partial
/// log. Throws ScenarioError only for invalid configurations.
SimResult simulate(const ScenarioConfig& cfg);

/// simulate() with the certification verdicts attached to the summary.
SimResult run_scenario(const ScenarioConfig& cfg);

/// Copies the verdict fields of a report into a summary.
void attach_analysis(RunSummary& summary, const CertificationReport& rep);

/// Versioned CSV: a "# gndi-timeseries v1" comment, a fixed header
/// line, then one row per sample with round-trip-exact doubles. Output
/// is a pure function of the rows (bit-identical across repeated runs).
void write_timeseries_csv(std::ostream& os, const std::vector<TimeSeriesRow>& rows);

std::string format_summary(const RunSummary& s);
std::string format_certification(const CertificationReport& rep);

/// Side-by-side table over several runs plus torque-effort deltas
/// against the first entry (the feedforward-cost observation).
std::string format_comparison(const std::vector<RunSummary>& runs);

const char* to_string(SolveStatus s);

}  // namespace gndi
