#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "coordsim/coordalg.hpp"
#include "coordsim/digraph.hpp"

namespace coordsim {

/// Virtual times and their rates for all vehicles.
struct CoordinationState {
  Eigen::VectorXd gamma;      // [s]
  Eigen::VectorXd gamma_dot;  // dimensionless

  /// gamma = 0, gamma_dot = 1.
  static CoordinationState initial(int n);
};

/// Desired mission pace: base rate, then a smooth cubic ramp to the final rate.
class MissionRateProfile {
 public:
  struct Params {
    double base = 1.0;
    double final_rate = 1.1;
    double ramp_start = 29.0;
    double ramp_end = 35.0;
    double gamma_dot_d_max = 0.15;   // bound on |rate - 1|
    double gamma_ddot_d_max = 0.05;  // bound on |accel|
  };

  MissionRateProfile() : MissionRateProfile(Params{}) {}
  /// Throws ConfigError when the declared bounds do not hold on a dense grid.
  explicit MissionRateProfile(const Params& p);

  double rate(double t) const;
  double accel(double t) const;
  const Params& params() const { return p_; }

 private:
  Params p_;
};

/// (v^T e) / (||v|| + delta), v the trajectory velocity at the virtual time.
double bar_alpha(const Eigen::Vector3d& traj_velocity, const Eigen::Vector3d& e_pf, double delta);

struct CoordinationGains {
  double a = 0.75;
  double b = 1.82;
  double delta = 1.2;
};

/// Per-node law: each vehicle i uses only its in-neighbors in `topology`:
///   gamma_ddot_i = -b (gamma_dot_i - rate(t)) - a sum_j (gamma_i - gamma_j) - bar_alpha_i.
/// `e_pf` and `traj_velocities` are n x 3.
Eigen::VectorXd coordination_accel(const CoordinationState& state, const Digraph& topology,
                                   const Eigen::MatrixXd& e_pf,
                                   const Eigen::MatrixXd& traj_velocities,
                                   const MissionRateProfile& profile, double t,
                                   const CoordinationGains& gains);

struct CoordinationError {
  Eigen::VectorXd xi1;  // Q gamma
  Eigen::VectorXd xi2;  // gamma_dot - rate 1
  double norm = 0.0;
};

CoordinationError coordination_error(const CoordinationState& state, const ProjectionMatrix& q,
                                     double gamma_dot_d);

struct FeasibilityBounds {
  double gamma_dot_max = 0.5;
  double gamma_ddot_max = 5.0;
};

struct FeasibilityViolation {
  int vehicle = 0;  // 1-based
  double time = 0.0;
  std::string bound;  // "rate" or "accel"
  double value = 0.0;
};

std::vector<FeasibilityViolation> feasibility_check(const CoordinationState& state,
                                                    const Eigen::VectorXd& gamma_ddot,
                                                    const FeasibilityBounds& bounds,
                                                    double t = 0.0);

}  // namespace coordsim
