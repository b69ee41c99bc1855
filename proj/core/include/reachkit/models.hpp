#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "reachkit/targets.hpp"

namespace reachkit {

using State = std::vector<double>;
using Control = std::vector<double>;

/// Named scalar parameters of a builtin system, e.g. {"m", 235717.0}.
using ParamSet = std::map<std::string, double>;

/// Continuous vector field f(s, u). Writes ds/dt into `out` (length dim).
using VectorField = std::function<void(std::span<const double> s, std::span<const double> u,
                                       std::span<double> out)>;

/// A continuous-time control system s' = f(s, u) with a box of admissible
/// controls. Immutable once built, so one instance can be shared by all
/// solver workers.
class SystemModel {
 public:
  SystemModel(std::string name, std::size_t dim, std::vector<Interval> control_bounds,
              VectorField field);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  std::size_t control_dim() const { return control_bounds_.size(); }
  const std::vector<Interval>& control_bounds() const { return control_bounds_; }

  /// Checked evaluation: validates lengths and control bounds, and throws
  /// ModelError naming the state if the result is not finite.
  State eval(std::span<const double> s, std::span<const double> u) const;

  /// Unchecked evaluation for inner loops. Sizes are the caller's problem.
  void eval_into(std::span<const double> s, std::span<const double> u,
                 std::span<double> out) const {
    field_(s, u, out);
  }

 private:
  std::string name_;
  std::size_t dim_;
  std::vector<Interval> control_bounds_;
  VectorField field_;
};

/// out = s + ds * dt. The single Euler update shared by the solver and the
/// trajectory oracle so both integrate identically.
inline void euler_step_into(std::span<const double> s, std::span<const double> ds, double dt,
                            std::span<double> out) {
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] + ds[i] * dt;
}

/// One step of the frozen-in-target discrete dynamics:
/// s + f(s,u)*dt outside K, s unchanged inside K (membership tested before the step).
State modified_step(const SystemModel& system, const TargetSet& target,
                    std::span<const double> s, std::span<const double> u, double dt);

/// 0 inside K, 1 outside.
double running_cost(const TargetSet& target, std::span<const double> s);

/// Cartesian product of per-dimension uniform grids, last dimension fastest.
/// counts[i] >= 2 includes both endpoints; counts[i] == 1 picks the midpoint.
std::vector<Control> discretize_controls(std::span<const Interval> bounds,
                                         std::span<const int> counts);

// ---------------------------------------------------------------------------
// Longitudinal flight with thrust scheduled to hold airspeed constant.
// State is (alpha, q, theta); the control is the elevator deflection.

struct LongitudinalParams {
  double m = 0, I_y = 0, S = 0, b_bar = 0, rho = 0, v = 0, g = 0;
  double C_L0 = 0, C_L_alpha = 0, C_L_de = 0;
  double C_D0 = 0, C_D_alpha = 0, C_D_alpha2 = 0, C_D_de = 0;
  double C_m0 = 0, C_m_alpha = 0, C_m_q = 0, C_m_de = 0;

  static LongitudinalParams from_params(const ParamSet& params);
  ParamSet to_params() const;
  void validate() const;
};

/// Thrust that zeroes the airspeed derivative at (alpha, q, theta) and elevator `de`.
double thrust_for_constant_speed(const LongitudinalParams& p, std::span<const double> s, double de);

/// The airspeed derivative of the full four-state model for a given thrust.
double longitudinal_speed_rate(const LongitudinalParams& p, std::span<const double> s, double de,
                               double thrust);

void longitudinal_derivative(const LongitudinalParams& p, std::span<const double> s, double de,
                             std::span<double> out);

// ---------------------------------------------------------------------------
// Aircraft ground roll, state (v_x, v_y, r), control nose-wheel angle.
//
// UNDERDETERMINED MODEL: only the nose-wheel tire force and the resultant
// force/moment structure are published for this aircraft. The gear loads, rolling forces, main
// gear side forces and aerodynamic yaw moment are a documented closure:
//   * vertical load W = m g - qbar S C_L0, split statically by lever arms,
//     nose P_n = W a_m / (a_n + a_m), mains share the rest equally;
//   * rolling forces Q_i = mu * P_i;
//   * main gear side force uses the nose-wheel tire formula with slip
//     atan2(v_y - r a_m, v_x) and no steering;
//   * yaw moment n = qbar S b_bar (C_n_beta beta + C_n_r r b_bar / (2 V));
//   * drag qbar S C_D0 along the airspeed, side force qbar S C_Y_beta beta.
// See README for the full list of substitutions.

struct GroundMotionParams {
  double m = 0, I_z = 0, S = 0, b_bar = 0, rho = 0;
  double b_w = 0, a_n = 0, a_m = 0;
  double mu = 0, mu_d = 0, mu_b = 0, mu_c = 0, mu_e = 0;
  double C_D0 = 0, C_Y_beta = 0, C_n_beta = 0, C_n_r = 0, C_L0 = 0;
  double g = 0, thrust = 0;

  static GroundMotionParams from_params(const ParamSet& params);
  ParamSet to_params() const;
  void validate() const;
};

/// Magic-formula lateral tire force for slip angle `slip` under vertical load `load`.
double tire_lateral_force(const GroundMotionParams& p, double slip, double load);

/// Nose-wheel slip angle for steering angle `theta_w`.
double nose_slip_angle(const GroundMotionParams& p, double vx, double vy, double r,
                       double theta_w);

void ground_motion_derivative(const GroundMotionParams& p, std::span<const double> s,
                              double theta_w, std::span<double> out);

// ---------------------------------------------------------------------------

/// Names accepted by builtin_system.
const std::vector<std::string>& builtin_system_names();

/// Embedded parameter preset for `name` (the published tables for the aircraft
/// models). Throws UsageError for unknown names.
ParamSet default_params(const std::string& name);

/// Build a builtin system. `params` must contain every key of the preset;
/// missing keys raise ConfigError listing them, unknown keys are rejected too.
SystemModel builtin_system(const std::string& name, const ParamSet& params);

/// Same, using the embedded preset.
SystemModel builtin_system(const std::string& name);

}  // namespace reachkit
