#include "coordsim/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "coordsim/errors.hpp"

namespace coordsim {

Trajectory::Trajectory(const Params& p) : p_(p) {
  if (!(p_.t_f > 0.0)) throw ConfigError(fmt::format("trajectory t_f must be > 0, got {}", p_.t_f));
  constexpr int kGrid = 10000;
  for (int k = 0; k <= kGrid; ++k) {
    const auto s = eval(p_.t_f * k / kGrid);
    v_d_max_ = std::max(v_d_max_, s.velocity.norm());
    a_d_max_ = std::max(a_d_max_, s.acceleration.norm());
  }
  v_d_max_ *= 1.2;
  a_d_max_ *= 1.2;
}

Trajectory Trajectory::reconnaissance(int i) {
  Params p;
  p.lateral_offset = 6.0 - 2.0 * i;
  p.heading = -std::numbers::pi / 2.0 + std::numbers::pi * i / 6.0;
  return Trajectory(p);
}

Trajectory::Sample Trajectory::eval(double t_d) const {
  Sample s;
  s.clamped = t_d < 0.0 || t_d > p_.t_f;
  const double t = std::clamp(t_d, 0.0, p_.t_f);
  const double k = p_.decay;
  const double sn = std::sin(p_.heading);
  const double env = std::exp(-k * t);
  const double poly = p_.c0 + p_.c1 * t;

  s.position = {t, p_.lateral_offset - env * poly * sn, p_.altitude};
  s.velocity = {1.0, sn * env * (k * poly - p_.c1), 0.0};
  s.acceleration = {0.0, sn * env * (2.0 * k * p_.c1 - k * k * poly), 0.0};
  return s;
}

Trajectory::Sample eval_trajectory(const Trajectory& traj, double t_d) { return traj.eval(t_d); }

Eigen::Vector3d pf_error(const Trajectory& traj, double gamma_i, const Eigen::Vector3d& p_i) {
  return traj.eval(gamma_i).position - p_i;
}

Eigen::Vector3d pf_control(const VehicleState& vs, const Eigen::Vector3d& target_pos,
                           const Eigen::Vector3d& target_vel, const TrackingGains& gains) {
  Eigen::Vector3d u = gains.kp * (target_pos - vs.p) + gains.kd * (target_vel - vs.v);
  const double norm = u.norm();
  if (norm > gains.a_max) u *= gains.a_max / norm;
  return u;
}

Eigen::Vector3d apply_disturbance(const Eigen::Vector3d& accel, const Gust& gust, double t) {
  if (!(gust.t_start < gust.t_end)) throw ArgumentError("gust window must have t_start < t_end");
  if (t >= gust.t_start && t < gust.t_end) return accel + gust.accel;
  return accel;
}

Eigen::Vector3d saturate_velocity(const Eigen::Vector3d& v, double v_max) {
  const double norm = v.norm();
  return norm > v_max ? Eigen::Vector3d(v * (v_max / norm)) : v;
}

}  // namespace coordsim
