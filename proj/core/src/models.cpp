#include "reachkit/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "reachkit/error.hpp"
#include "reachkit/format.hpp"

namespace reachkit {

SystemModel::SystemModel(std::string name, std::size_t dim, std::vector<Interval> control_bounds,
                         VectorField field)
    : name_(std::move(name)),
      dim_(dim),
      control_bounds_(std::move(control_bounds)),
      field_(std::move(field)) {
  if (dim_ == 0) throw UsageError("system '" + name_ + "': state dimension must be positive");
  if (control_bounds_.empty()) throw UsageError("system '" + name_ + "': no control dimensions");
  for (const auto& b : control_bounds_) {
    if (!(b.lo <= b.hi)) throw UsageError("system '" + name_ + "': control bound with lo > hi");
  }
  if (!field_) throw UsageError("system '" + name_ + "': empty vector field");
}

State SystemModel::eval(std::span<const double> s, std::span<const double> u) const {
  if (s.size() != dim_)
    throw UsageError("system '" + name_ + "': state has " + std::to_string(s.size()) +
                     " components, expected " + std::to_string(dim_));
  if (u.size() != control_dim())
    throw UsageError("system '" + name_ + "': control has " + std::to_string(u.size()) +
                     " components, expected " + std::to_string(control_dim()));
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!control_bounds_[i].contains(u[i]))
      throw UsageError("system '" + name_ + "': control " + format_vector(u) + " out of bounds");
  }
  State out(dim_);
  field_(s, u, out);
  for (double x : out) {
    if (!std::isfinite(x))
      throw ModelError("system '" + name_ + "': non-finite derivative at state " +
                       format_vector(s));
  }
  return out;
}

State modified_step(const SystemModel& system, const TargetSet& target,
                    std::span<const double> s, std::span<const double> u, double dt) {
  if (!(dt > 0)) throw UsageError("modified_step: dt must be positive");
  State next(s.begin(), s.end());
  if (target.contains(s)) return next;
  const State ds = system.eval(s, u);
  euler_step_into(s, ds, dt, next);
  return next;
}

double running_cost(const TargetSet& target, std::span<const double> s) {
  return target.contains(s) ? 0.0 : 1.0;
}

std::vector<Control> discretize_controls(std::span<const Interval> bounds,
                                         std::span<const int> counts) {
  if (bounds.empty()) throw UsageError("discretize_controls: empty bounds list");
  if (counts.size() != bounds.size())
    throw UsageError("discretize_controls: " + std::to_string(counts.size()) + " counts for " +
                     std::to_string(bounds.size()) + " control dimensions");
  std::vector<std::vector<double>> axes(bounds.size());
  std::size_t total = 1;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const int n = counts[i];
    if (n < 1) throw UsageError("discretize_controls: counts must be >= 1");
    const auto& b = bounds[i];
    if (n == 1) {
      axes[i].push_back(0.5 * (b.lo + b.hi));
    } else {
      for (int j = 0; j < n; ++j) {
        // Endpoints are set directly so they are exact.
        if (j == 0)
          axes[i].push_back(b.lo);
        else if (j == n - 1)
          axes[i].push_back(b.hi);
        else
          axes[i].push_back(b.lo + (b.hi - b.lo) * static_cast<double>(j) / (n - 1));
      }
    }
    total *= axes[i].size();
  }

  std::vector<Control> out;
  out.reserve(total);
  std::vector<std::size_t> idx(bounds.size(), 0);
  for (std::size_t k = 0; k < total; ++k) {
    Control u(bounds.size());
    for (std::size_t i = 0; i < bounds.size(); ++i) u[i] = axes[i][idx[i]];
    out.push_back(std::move(u));
    for (std::size_t i = bounds.size(); i-- > 0;) {
      if (++idx[i] < axes[i].size()) break;
      idx[i] = 0;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double require(const ParamSet& params, const char* key) {
  auto it = params.find(key);
  if (it == params.end()) throw ConfigError(std::string("missing parameter '") + key + "'");
  return it->second;
}

void require_positive(double v, const char* what) {
  if (!(v > 0)) throw ConfigError(std::string("parameter '") + what + "' must be positive");
}

}  // namespace

LongitudinalParams LongitudinalParams::from_params(const ParamSet& params) {
  LongitudinalParams p;
  p.m = require(params, "m");
  p.I_y = require(params, "I_y");
  p.S = require(params, "S");
  p.b_bar = require(params, "b_bar");
  p.rho = require(params, "rho");
  p.v = require(params, "v");
  p.g = require(params, "g");
  p.C_L0 = require(params, "C_L0");
  p.C_L_alpha = require(params, "C_L_alpha");
  p.C_L_de = require(params, "C_L_de");
  p.C_D0 = require(params, "C_D0");
  p.C_D_alpha = require(params, "C_D_alpha");
  p.C_D_alpha2 = require(params, "C_D_alpha2");
  p.C_D_de = require(params, "C_D_de");
  p.C_m0 = require(params, "C_m0");
  p.C_m_alpha = require(params, "C_m_alpha");
  p.C_m_q = require(params, "C_m_q");
  p.C_m_de = require(params, "C_m_de");
  p.validate();
  return p;
}

ParamSet LongitudinalParams::to_params() const {
  return {{"m", m},           {"I_y", I_y},         {"S", S},
          {"b_bar", b_bar},   {"rho", rho},         {"v", v},
          {"g", g},           {"C_L0", C_L0},       {"C_L_alpha", C_L_alpha},
          {"C_L_de", C_L_de}, {"C_D0", C_D0},       {"C_D_alpha", C_D_alpha},
          {"C_D_alpha2", C_D_alpha2},               {"C_D_de", C_D_de},
          {"C_m0", C_m0},     {"C_m_alpha", C_m_alpha}, {"C_m_q", C_m_q},
          {"C_m_de", C_m_de}};
}

void LongitudinalParams::validate() const {
  require_positive(m, "m");
  require_positive(I_y, "I_y");
  require_positive(S, "S");
  require_positive(b_bar, "b_bar");
  require_positive(rho, "rho");
  require_positive(v, "v");
}

namespace {

double drag_coefficient(const LongitudinalParams& p, double alpha, double de) {
  return p.C_D0 + p.C_D_alpha * alpha + p.C_D_alpha2 * alpha * alpha + p.C_D_de * de;
}

}  // namespace

double thrust_for_constant_speed(const LongitudinalParams& p, std::span<const double> s,
                                 double de) {
  const double alpha = s[0], theta = s[2];
  const double c = std::cos(alpha);
  if (std::abs(c) < 1e-9)
    throw ModelError("constant-speed thrust is singular at alpha = " + format_double(alpha));
  const double qbar_s = 0.5 * p.rho * p.v * p.v * p.S;
  return (qbar_s * drag_coefficient(p, alpha, de) + p.m * p.g * std::sin(theta - alpha)) / c;
}

double longitudinal_speed_rate(const LongitudinalParams& p, std::span<const double> s, double de,
                               double thrust) {
  const double alpha = s[0], theta = s[2];
  const double qbar_s = 0.5 * p.rho * p.v * p.v * p.S;
  return (thrust * std::cos(alpha) - qbar_s * drag_coefficient(p, alpha, de) -
          p.m * p.g * std::sin(theta - alpha)) /
         p.m;
}

void longitudinal_derivative(const LongitudinalParams& p, std::span<const double> s, double de,
                             std::span<double> out) {
  const double alpha = s[0], q = s[1], theta = s[2];
  const double qbar_s = 0.5 * p.rho * p.v * p.v * p.S;
  const double thrust = thrust_for_constant_speed(p, s, de);
  const double cl = p.C_L0 + p.C_L_alpha * alpha + p.C_L_de * de;
  const double cm = p.C_m0 + p.C_m_alpha * alpha + p.C_m_q * q * p.b_bar / (2.0 * p.v) + p.C_m_de * de;
  out[0] = q + (-thrust * std::sin(alpha) - qbar_s * cl + p.m * p.g * std::cos(theta - alpha)) /
                   (p.m * p.v);
  out[1] = qbar_s * p.b_bar * cm / p.I_y;
  out[2] = q;
}

// ---------------------------------------------------------------------------

GroundMotionParams GroundMotionParams::from_params(const ParamSet& params) {
  GroundMotionParams p;
  p.m = require(params, "m");
  p.I_z = require(params, "I_z");
  p.S = require(params, "S");
  p.b_bar = require(params, "b_bar");
  p.rho = require(params, "rho");
  p.b_w = require(params, "b_w");
  p.a_n = require(params, "a_n");
  p.a_m = require(params, "a_m");
  p.mu = require(params, "mu");
  p.mu_d = require(params, "mu_d");
  p.mu_b = require(params, "mu_b");
  p.mu_c = require(params, "mu_c");
  p.mu_e = require(params, "mu_e");
  p.C_D0 = require(params, "C_D0");
  p.C_Y_beta = require(params, "C_Y_beta");
  p.C_n_beta = require(params, "C_n_beta");
  p.C_n_r = require(params, "C_n_r");
  p.C_L0 = require(params, "C_L0");
  p.g = require(params, "g");
  p.thrust = require(params, "thrust");
  p.validate();
  return p;
}

ParamSet GroundMotionParams::to_params() const {
  return {{"m", m},       {"I_z", I_z},         {"S", S},           {"b_bar", b_bar},
          {"rho", rho},   {"b_w", b_w},         {"a_n", a_n},       {"a_m", a_m},
          {"mu", mu},     {"mu_d", mu_d},       {"mu_b", mu_b},     {"mu_c", mu_c},
          {"mu_e", mu_e}, {"C_D0", C_D0},       {"C_Y_beta", C_Y_beta},
          {"C_n_beta", C_n_beta},               {"C_n_r", C_n_r},   {"C_L0", C_L0},
          {"g", g},       {"thrust", thrust}};
}

void GroundMotionParams::validate() const {
  require_positive(m, "m");
  require_positive(I_z, "I_z");
  require_positive(a_n, "a_n");
  require_positive(a_m, "a_m");
  require_positive(b_w, "b_w");
}

double tire_lateral_force(const GroundMotionParams& p, double slip, double load) {
  const double x = p.mu_b * std::tan(slip);
  const double ax = std::atan(x);
  return -p.mu_d * std::sin(p.mu_c * ax - p.mu_e * (x - ax)) * load;
}

double nose_slip_angle(const GroundMotionParams& p, double vx, double vy, double r,
                       double theta_w) {
  const double lat = vy + r * p.a_n;
  const double c = std::cos(theta_w), s = std::sin(theta_w);
  return std::atan2(lat * c - vx * s, vx * c + lat * s);
}

void ground_motion_derivative(const GroundMotionParams& p, std::span<const double> s,
                              double theta_w, std::span<double> out) {
  const double vx = s[0], vy = s[1], r = s[2];
  const double speed = std::hypot(vx, vy);
  const double beta = std::atan2(vy, vx);
  const double qbar_s = 0.5 * p.rho * speed * speed * p.S;

  const double drag = qbar_s * p.C_D0;
  const double side = qbar_s * p.C_Y_beta * beta;
  const double lift = qbar_s * p.C_L0;

  const double weight = p.m * p.g - lift;
  const double arm = p.a_n + p.a_m;
  const double load_nose = weight * p.a_m / arm;
  const double load_main = 0.5 * weight * p.a_n / arm;

  const double roll_nose = p.mu * load_nose;
  const double roll_left = p.mu * load_main;
  const double roll_right = p.mu * load_main;

  const double f_nose = tire_lateral_force(p, nose_slip_angle(p, vx, vy, r, theta_w), load_nose);
  const double f_main = tire_lateral_force(p, std::atan2(vy - r * p.a_m, vx), load_main);

  const double yaw_damping = speed > 0 ? p.C_n_r * r * p.b_bar / (2.0 * speed) : 0.0;
  const double yaw_aero = qbar_s * p.b_bar * (p.C_n_beta * beta + yaw_damping);

  const double cb = std::cos(beta), sb = std::sin(beta);
  const double fx = -drag * cb - side * sb - roll_nose - roll_left - roll_right + p.thrust;
  const double fy = side * cb - drag * sb - f_nose - 2.0 * f_main;
  // Rolling forces enter the yaw balance as a left/right differential; it is
  // zero under the symmetric static load split.
  const double mz = yaw_aero + 2.0 * f_main * p.a_m - f_nose * p.a_n +
                    (roll_right - roll_left) * p.b_w / 2.0;

  out[0] = r * vy + fx / p.m;
  out[1] = -r * vx + fy / p.m;
  out[2] = mz / p.I_z;
}

// ---------------------------------------------------------------------------

namespace {

const LongitudinalParams& table1() {
  static const LongitudinalParams p = [] {
    LongitudinalParams t;
    t.m = 235717;
    t.I_y = 22428285;
    t.S = 524;
    t.b_bar = 6.32;
    t.rho = 1.293;
    t.v = 200;
    t.g = 9.81;
    t.C_L0 = 0.1;
    t.C_L_alpha = 2.4;
    t.C_L_de = 0.2;
    t.C_D0 = 0.00108;
    t.C_D_alpha = 0.01;
    t.C_D_alpha2 = 0.6;
    t.C_D_de = 0.05;
    t.C_m0 = 0.04;
    t.C_m_alpha = -0.2;
    t.C_m_q = -1;
    t.C_m_de = -1.2;
    return t;
  }();
  return p;
}

const GroundMotionParams& table2() {
  static const GroundMotionParams p = [] {
    GroundMotionParams t;
    t.m = 104915.9;
    t.I_z = 10504308.1;
    t.S = 249.9;
    t.b_bar = 12.1;
    t.rho = 1.293;
    t.b_w = 23.8;
    t.a_n = 17.9;
    t.a_m = 2.3;
    t.mu = 0.04;
    t.mu_d = 0.1014;
    t.mu_b = -10.11;
    t.mu_c = 1.438;
    t.mu_e = -0.8507;
    t.C_D0 = 0.061;
    t.C_Y_beta = -1.4;
    t.C_n_beta = 0.2;
    t.C_n_r = -1.5;
    t.C_L0 = -0.053;
    t.g = 9.81;
    t.thrust = 0.0;
    return t;
  }();
  return p;
}

void check_keys(const std::string& name, const ParamSet& expected, const ParamSet& given) {
  std::vector<std::string> missing, unknown;
  for (const auto& [k, v] : expected) {
    if (!given.contains(k)) missing.push_back(k);
  }
  for (const auto& [k, v] : given) {
    if (!expected.contains(k)) unknown.push_back(k);
  }
  auto join = [](const std::vector<std::string>& keys) {
    std::string s;
    for (const auto& k : keys) s += (s.empty() ? "" : ", ") + k;
    return s;
  };
  if (!missing.empty())
    throw ConfigError("system '" + name + "': missing parameters: " + join(missing));
  if (!unknown.empty())
    throw ConfigError("system '" + name + "': unknown parameters: " + join(unknown));
}

}  // namespace

const std::vector<std::string>& builtin_system_names() {
  static const std::vector<std::string> names = {"single_integrator", "double_integrator",
                                                 "dubins_car", "longitudinal_flight",
                                                 "ground_motion"};
  return names;
}

ParamSet default_params(const std::string& name) {
  if (name == "single_integrator" || name == "double_integrator") return {};
  if (name == "dubins_car") return {{"speed", 1.0}, {"turn_rate", 1.0}};
  if (name == "longitudinal_flight") return table1().to_params();
  if (name == "ground_motion") return table2().to_params();
  throw UsageError("unknown system '" + name + "'");
}

SystemModel builtin_system(const std::string& name, const ParamSet& params) {
  check_keys(name, default_params(name), params);

  if (name == "single_integrator") {
    return SystemModel(name, 1, {{-1.0, 1.0}},
                       [](std::span<const double>, std::span<const double> u,
                          std::span<double> out) { out[0] = u[0]; });
  }
  if (name == "double_integrator") {
    return SystemModel(name, 2, {{-1.0, 1.0}},
                       [](std::span<const double> s, std::span<const double> u,
                          std::span<double> out) {
                         out[0] = s[1];
                         out[1] = u[0];
                       });
  }
  if (name == "dubins_car") {
    const double speed = params.at("speed");
    const double turn_rate = params.at("turn_rate");
    if (!(speed > 0) || !(turn_rate > 0))
      throw ConfigError("system 'dubins_car': speed and turn_rate must be positive");
    return SystemModel(name, 3, {{-1.0, 1.0}},
                       [speed, turn_rate](std::span<const double> s, std::span<const double> u,
                                          std::span<double> out) {
                         out[0] = speed * std::cos(s[2]);
                         out[1] = speed * std::sin(s[2]);
                         out[2] = turn_rate * u[0];
                       });
  }
  if (name == "longitudinal_flight") {
    const auto p = LongitudinalParams::from_params(params);
    return SystemModel(name, 3, {{-0.3, 0.3}},
                       [p](std::span<const double> s, std::span<const double> u,
                           std::span<double> out) { longitudinal_derivative(p, s, u[0], out); });
  }
  // ground_motion; default_params already rejected anything else
  const auto p = GroundMotionParams::from_params(params);
  return SystemModel(name, 3, {{-0.15, 0.15}},
                     [p](std::span<const double> s, std::span<const double> u,
                         std::span<double> out) { ground_motion_derivative(p, s, u[0], out); });
}

SystemModel builtin_system(const std::string& name) {
  return builtin_system(name, default_params(name));
}

}  // namespace reachkit
