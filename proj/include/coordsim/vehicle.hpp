#pragma once

#include <vector>

#include <Eigen/Core>

namespace coordsim {

/// Desired trajectory p(t) = [t, d - e^{-k t} (c0 + c1 t) sin(theta), h] on [0, t_f].
///
/// Velocity and acceleration are the analytic derivatives. Design bounds
/// `v_d_max` / `a_d_max` are measured on a dense grid at construction and
/// padded by 20%.
class Trajectory {
 public:
  struct Params {
    double lateral_offset = 0.0;  // d
    double heading = 0.0;         // theta [rad]
    double decay = 0.6;
    double c0 = 5.0;
    double c1 = 3.0;
    double altitude = 2.0;
    double t_f = 50.0;
  };

  struct Sample {
    Eigen::Vector3d position;
    Eigen::Vector3d velocity;
    Eigen::Vector3d acceleration;
    bool clamped = false;  // t_d was outside [0, t_f]
  };

  explicit Trajectory(const Params& p);

  /// Vehicle i (1-based) of the five-vehicle reconnaissance family:
  /// d_i = 6 - 2i, theta_i = -pi/2 + pi i / 6.
  static Trajectory reconnaissance(int i);

  Sample eval(double t_d) const;
  double t_f() const { return p_.t_f; }
  double v_d_max() const { return v_d_max_; }
  double a_d_max() const { return a_d_max_; }
  const Params& params() const { return p_; }

 private:
  Params p_;
  double v_d_max_ = 0.0;
  double a_d_max_ = 0.0;
};

Trajectory::Sample eval_trajectory(const Trajectory& traj, double t_d);

struct VehicleState {
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
};

/// Virtual-target position minus vehicle position.
Eigen::Vector3d pf_error(const Trajectory& traj, double gamma_i, const Eigen::Vector3d& p_i);

struct TrackingGains {
  double kp = 4.0;     // [1/s^2]
  double kd = 4.0;     // [1/s]
  double a_max = 10.0; // [m/s^2]
  double v_max = 5.0;  // [m/s]
};

/// kp (target_pos - p) + kd (target_vel - v), scaled down to norm <= a_max.
Eigen::Vector3d pf_control(const VehicleState& vs, const Eigen::Vector3d& target_pos,
                           const Eigen::Vector3d& target_vel, const TrackingGains& gains);

/// Wind gust acting on one vehicle over [t_start, t_end).
struct Gust {
  int vehicle = 1;  // 1-based
  Eigen::Vector3d accel = Eigen::Vector3d::Zero();
  double t_start = 0.0;
  double t_end = 0.0;
};

Eigen::Vector3d apply_disturbance(const Eigen::Vector3d& accel, const Gust& gust, double t);

/// Scales v down to norm <= v_max.
Eigen::Vector3d saturate_velocity(const Eigen::Vector3d& v, double v_max);

}  // namespace coordsim
