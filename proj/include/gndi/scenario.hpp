#pragma once

#include <stdexcept>
#include <string>

#include "gndi/lti.hpp"
#include "gndi/plant.hpp"
#include "gndi/so3.hpp"

namespace gndi {

/// Configuration loading or validation failure; the message names the
/// offending field (or the parse location for malformed files).
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Per-channel compensator gains K(s) = kp + ki/(s + eps) + kd s/(tau_f s + 1).
struct ChannelGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double eps = 0.0;
  double tau_f = 1.0;
};

enum class ControllerType { Geometric, EulerBaseline };
enum class ManeuverType { Flips, Regulation };

/// One closed-loop experiment, fully specified. Field defaults are the
/// shipped vehicle and gain set; the configuration file may override
/// any of them and unknown keys are rejected.
struct ScenarioConfig {
  std::string name;

  // controller
  ControllerType controller = ControllerType::Geometric;
  bool feedforward = true;
  ChannelGains attitude_gains{-27.75, -1.85, -5.55, 1e-3, 10.0};
  ChannelGains rate_gains{4.2, 0.0, 0.42, 0.0, 10.0};

  // plant (rigid body): 2 kg camera-carrier hexacopter, 0.6 m rotor circle
  Vec3 inertia{0.024, 0.024, 0.042};  // principal moments, kg m^2
  double damping = 3e-4;              // isotropic rotational damping, N m s
  Vec3 initial_attitude = Vec3::Zero();  // rotation vector, rad
  bool random_initial_attitude = false;  // Haar sample from `seed` instead
  Vec3 initial_rate = Vec3::Zero();      // rad/s

  // rate sensor in the feedback path
  bool sensor_enabled = true;
  double sensor_delay = 0.005;    // s
  int pade_order = 3;             // delay approximation order for analysis
  double lag_cutoff_hz = 100.0;

  // rotor actuation chain: 7-inch racing powertrain carrying the 2 kg frame
  bool actuation_enabled = true;
  double arm_length = 0.30;            // m
  double k_f = 2.0e-6;                 // N/(rad/s)^2
  double k_m = 3.0e-8;                 // N m/(rad/s)^2
  double mass = 2.0;                   // kg, sets the held hover thrust
  double gravity = 9.81;               // m/s^2
  double motor_time_constant = 0.008;  // s
  double speed_min = 160.0;            // rad/s
  double speed_max = 2100.0;           // rad/s

  // maneuver
  ManeuverType maneuver = ManeuverType::Flips;
  double filter_natural_frequency = 15.0;
  double filter_damping_ratio = 0.707;

  // integration
  double dt = 5e-4;      // s
  double duration = 6.0;  // s
  unsigned long seed = 0;

  // output file names (joined to the chosen output directory)
  std::string csv_name;      // defaults to "<name>.csv"
  std::string summary_name;  // defaults to "<name>_summary.txt"
};

/// Parses a configuration from JSON text. `origin` names the source in
/// error messages. Unknown keys anywhere in the tree are rejected; every
/// value is validated and errors name the field path.
ScenarioConfig parse_scenario(const std::string& text, const std::string& origin);

/// Reads and parses a configuration file.
ScenarioConfig load_scenario(const std::string& path);

/// Re-checks the cross-field invariants of a (possibly hand-built)
/// config; throws ScenarioError naming the field.
void validate_scenario(const ScenarioConfig& cfg);

/// Three identical channels of the configured attitude compensator.
StateSpace attitude_compensator(const ScenarioConfig& cfg);

/// Three identical channels of the configured rate compensator.
StateSpace rate_compensator(const ScenarioConfig& cfg);

/// Rigid-body parameters from the config.
PlantParams scenario_plant(const ScenarioConfig& cfg);

/// Initial attitude: the configured rotation vector, or a Haar-random
/// rotation drawn deterministically from the seed.
Mat3 scenario_initial_attitude(const ScenarioConfig& cfg);

}  // namespace gndi
