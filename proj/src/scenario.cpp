#include "gndi/scenario.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace gndi {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw ScenarioError(field + ": " + why);
}

void require_known_keys(const json& j, const std::string& path,
                        std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* a : allowed)
      if (it.key() == a) {
        known = true;
        break;
      }
    if (!known) fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
  }
}

const json* child(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double num_field(const json& j, const char* key, const std::string& path, double fallback) {
  const json* v = child(j, key);
  if (!v) return fallback;
  if (!v->is_number()) fail(path + "." + key, "expected a number");
  return v->get<double>();
}

int int_field(const json& j, const char* key, const std::string& path, int fallback) {
  const json* v = child(j, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) fail(path + "." + key, "expected an integer");
  return v->get<int>();
}

bool bool_field(const json& j, const char* key, const std::string& path, bool fallback) {
  const json* v = child(j, key);
  if (!v) return fallback;
  if (!v->is_boolean()) fail(path + "." + key, "expected true or false");
  return v->get<bool>();
}

std::string str_field(const json& j, const char* key, const std::string& path,
                      const std::string& fallback) {
  const json* v = child(j, key);
  if (!v) return fallback;
  if (!v->is_string()) fail(path + "." + key, "expected a string");
  return v->get<std::string>();
}

Vec3 vec3_field(const json& j, const char* key, const std::string& path, const Vec3& fallback) {
  const json* v = child(j, key);
  if (!v) return fallback;
  if (!v->is_array() || v->size() != 3 || !(*v)[0].is_number() || !(*v)[1].is_number() ||
      !(*v)[2].is_number())
    fail(path + "." + key, "expected an array of 3 numbers");
  return Vec3((*v)[0].get<double>(), (*v)[1].get<double>(), (*v)[2].get<double>());
}

ChannelGains gains_field(const json& j, const char* key, const std::string& path,
                         const ChannelGains& fallback) {
  const json* v = child(j, key);
  if (!v) return fallback;
  const std::string p = path + "." + key;
  if (!v->is_object()) fail(p, "expected an object");
  require_known_keys(*v, p, {"kp", "ki", "kd", "eps", "tau_f"});
  ChannelGains g = fallback;
  g.kp = num_field(*v, "kp", path, g.kp);
  g.ki = num_field(*v, "ki", path, g.ki);
  g.kd = num_field(*v, "kd", path, g.kd);
  g.eps = num_field(*v, "eps", path, g.eps);
  g.tau_f = num_field(*v, "tau_f", path, g.tau_f);
  return g;
}

void check_gains(const ChannelGains& g, const std::string& path) {
  if (g.eps < 0.0) fail(path + ".eps", "must be >= 0");
  if (g.kd != 0.0 && !(g.tau_f > 0.0)) fail(path + ".tau_f", "must be > 0 when kd is nonzero");
}

// Portable uniform double in [0, 1) from the top 53 bits.
double u01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

}  // namespace

ScenarioConfig parse_scenario(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(origin + ": " + e.what());
  }
  if (!root.is_object()) throw ScenarioError(origin + ": top level must be an object");
  require_known_keys(root, "",
                     {"name", "controller", "plant", "sensor", "actuation", "maneuver", "sim",
                      "output"});

  ScenarioConfig cfg;
  cfg.name = str_field(root, "name", "", "");

  if (const json* c = child(root, "controller")) {
    if (!c->is_object()) fail("controller", "expected an object");
    require_known_keys(*c, "controller", {"type", "feedforward", "attitude", "rate"});
    const std::string type = str_field(*c, "type", "controller", "geometric");
    if (type == "geometric")
      cfg.controller = ControllerType::Geometric;
    else if (type == "euler")
      cfg.controller = ControllerType::EulerBaseline;
    else
      fail("controller.type", "expected \"geometric\" or \"euler\"");
    cfg.feedforward = bool_field(*c, "feedforward", "controller", cfg.feedforward);
    cfg.attitude_gains = gains_field(*c, "attitude", "controller", cfg.attitude_gains);
    cfg.rate_gains = gains_field(*c, "rate", "controller", cfg.rate_gains);
  }

  if (const json* p = child(root, "plant")) {
    if (!p->is_object()) fail("plant", "expected an object");
    require_known_keys(*p, "plant", {"inertia", "damping", "initial_attitude", "initial_rate"});
    cfg.inertia = vec3_field(*p, "inertia", "plant", cfg.inertia);
    cfg.damping = num_field(*p, "damping", "plant", cfg.damping);
    if (const json* ia = child(*p, "initial_attitude")) {
      if (ia->is_string()) {
        if (ia->get<std::string>() != "random")
          fail("plant.initial_attitude", "expected an array of 3 numbers or \"random\"");
        cfg.random_initial_attitude = true;
      } else {
        cfg.initial_attitude = vec3_field(*p, "initial_attitude", "plant", cfg.initial_attitude);
      }
    }
    cfg.initial_rate = vec3_field(*p, "initial_rate", "plant", cfg.initial_rate);
  }

  if (const json* s = child(root, "sensor")) {
    if (!s->is_object()) fail("sensor", "expected an object");
    require_known_keys(*s, "sensor", {"enabled", "delay", "pade_order", "lag_cutoff_hz"});
    cfg.sensor_enabled = bool_field(*s, "enabled", "sensor", cfg.sensor_enabled);
    cfg.sensor_delay = num_field(*s, "delay", "sensor", cfg.sensor_delay);
    cfg.pade_order = int_field(*s, "pade_order", "sensor", cfg.pade_order);
    cfg.lag_cutoff_hz = num_field(*s, "lag_cutoff_hz", "sensor", cfg.lag_cutoff_hz);
  }

  if (const json* a = child(root, "actuation")) {
    if (!a->is_object()) fail("actuation", "expected an object");
    require_known_keys(*a, "actuation",
                       {"enabled", "arm_length", "k_f", "k_m", "mass", "gravity",
                        "motor_time_constant", "speed_min", "speed_max"});
    cfg.actuation_enabled = bool_field(*a, "enabled", "actuation", cfg.actuation_enabled);
    cfg.arm_length = num_field(*a, "arm_length", "actuation", cfg.arm_length);
    cfg.k_f = num_field(*a, "k_f", "actuation", cfg.k_f);
    cfg.k_m = num_field(*a, "k_m", "actuation", cfg.k_m);
    cfg.mass = num_field(*a, "mass", "actuation", cfg.mass);
    cfg.gravity = num_field(*a, "gravity", "actuation", cfg.gravity);
    cfg.motor_time_constant = num_field(*a, "motor_time_constant", "actuation",
                                        cfg.motor_time_constant);
    cfg.speed_min = num_field(*a, "speed_min", "actuation", cfg.speed_min);
    cfg.speed_max = num_field(*a, "speed_max", "actuation", cfg.speed_max);
  }

  if (const json* m = child(root, "maneuver")) {
    if (!m->is_object()) fail("maneuver", "expected an object");
    require_known_keys(*m, "maneuver", {"type", "filter_wn", "filter_zeta"});
    const std::string type = str_field(*m, "type", "maneuver", "flips");
    if (type == "flips")
      cfg.maneuver = ManeuverType::Flips;
    else if (type == "regulation")
      cfg.maneuver = ManeuverType::Regulation;
    else
      fail("maneuver.type", "expected \"flips\" or \"regulation\"");
    cfg.filter_natural_frequency = num_field(*m, "filter_wn", "maneuver",
                                             cfg.filter_natural_frequency);
    cfg.filter_damping_ratio = num_field(*m, "filter_zeta", "maneuver", cfg.filter_damping_ratio);
  }

  if (const json* s = child(root, "sim")) {
    if (!s->is_object()) fail("sim", "expected an object");
    require_known_keys(*s, "sim", {"dt", "duration", "seed"});
    cfg.dt = num_field(*s, "dt", "sim", cfg.dt);
    cfg.duration = num_field(*s, "duration", "sim", cfg.duration);
    if (const json* v = child(*s, "seed")) {
      if (!v->is_number_unsigned()) fail("sim.seed", "expected a nonnegative integer");
      cfg.seed = v->get<unsigned long>();
    }
  }

  if (const json* o = child(root, "output")) {
    if (!o->is_object()) fail("output", "expected an object");
    require_known_keys(*o, "output", {"csv", "summary"});
    cfg.csv_name = str_field(*o, "csv", "output", cfg.csv_name);
    cfg.summary_name = str_field(*o, "summary", "output", cfg.summary_name);
  }
  if (cfg.csv_name.empty()) cfg.csv_name = cfg.name + ".csv";
  if (cfg.summary_name.empty()) cfg.summary_name = cfg.name + "_summary.txt";

  validate_scenario(cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

void validate_scenario(const ScenarioConfig& cfg) {
  if (cfg.name.empty()) fail("name", "required");
  for (char ch : cfg.name)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_'))
      fail("name", "use only letters, digits, '-', '_' (it names output files)");

  check_gains(cfg.attitude_gains, "controller.attitude");
  check_gains(cfg.rate_gains, "controller.rate");

  if (!(cfg.inertia.minCoeff() > 0.0)) fail("plant.inertia", "all entries must be > 0");
  if (!(cfg.damping >= 0.0)) fail("plant.damping", "must be >= 0");

  if (cfg.sensor_enabled) {
    if (!(cfg.sensor_delay > 0.0)) fail("sensor.delay", "must be > 0");
    if (cfg.pade_order < 1 || cfg.pade_order > 6) fail("sensor.pade_order", "must be in 1..6");
    if (!(cfg.lag_cutoff_hz > 0.0)) fail("sensor.lag_cutoff_hz", "must be > 0");
  }

  if (cfg.actuation_enabled) {
    if (!(cfg.arm_length > 0.0)) fail("actuation.arm_length", "must be > 0");
    if (!(cfg.k_f > 0.0)) fail("actuation.k_f", "must be > 0");
    if (!(cfg.k_m >= 0.0)) fail("actuation.k_m", "must be >= 0");
    if (!(cfg.mass > 0.0)) fail("actuation.mass", "must be > 0");
    if (!(cfg.gravity > 0.0)) fail("actuation.gravity", "must be > 0");
    if (!(cfg.motor_time_constant > 0.0)) fail("actuation.motor_time_constant", "must be > 0");
    if (!(cfg.speed_min >= 0.0) || !(cfg.speed_max > cfg.speed_min))
      fail("actuation.speed_min", "need 0 <= speed_min < speed_max");
  }

  if (!(cfg.filter_natural_frequency > 0.0)) fail("maneuver.filter_wn", "must be > 0");
  if (!(cfg.filter_damping_ratio > 0.0)) fail("maneuver.filter_zeta", "must be > 0");

  if (!(cfg.dt > 0.0)) fail("sim.dt", "must be > 0");
  if (!(cfg.duration >= cfg.dt)) fail("sim.duration", "must be >= dt");
}

StateSpace attitude_compensator(const ScenarioConfig& cfg) {
  const ChannelGains& g = cfg.attitude_gains;
  const StateSpace ch = make_lead_lag(g.kp, g.ki, g.kd, g.eps, g.tau_f);
  return diagonal({ch, ch, ch});
}

StateSpace rate_compensator(const ScenarioConfig& cfg) {
  const ChannelGains& g = cfg.rate_gains;
  const StateSpace ch = make_lead_lag(g.kp, g.ki, g.kd, g.eps, g.tau_f);
  return diagonal({ch, ch, ch});
}

PlantParams scenario_plant(const ScenarioConfig& cfg) {
  PlantParams p;
  p.J = cfg.inertia.asDiagonal();
  p.kappa = cfg.damping * Mat3::Identity();
  return p;
}

Mat3 scenario_initial_attitude(const ScenarioConfig& cfg) {
  if (!cfg.random_initial_attitude) return exp_so3(cfg.initial_attitude);
  // Haar-uniform rotation via a uniform unit quaternion, built from raw
  // generator words so the sample is reproducible across library builds.
  std::mt19937_64 g(cfg.seed);
  const double u1 = u01(g), u2 = u01(g), u3 = u01(g);
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  const Eigen::Quaterniond q(b * std::cos(2.0 * M_PI * u3), a * std::sin(2.0 * M_PI * u2),
                             a * std::cos(2.0 * M_PI * u2), b * std::sin(2.0 * M_PI * u3));
  return q.toRotationMatrix();
}

}  // namespace gndi
