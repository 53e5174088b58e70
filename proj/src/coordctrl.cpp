#include "coordsim/coordctrl.hpp"

#include <cmath>

#include <fmt/format.h>

#include "coordsim/errors.hpp"

namespace coordsim {

CoordinationState CoordinationState::initial(int n) {
  return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Ones(n)};
}

MissionRateProfile::MissionRateProfile(const Params& p) : p_(p) {
  if (!(p_.ramp_end > p_.ramp_start)) {
    throw ConfigError(fmt::format("mission rate ramp end {} must exceed start {}", p_.ramp_end,
                                  p_.ramp_start));
  }
  if (!(p_.gamma_dot_d_max > 0.0 && p_.gamma_dot_d_max < 1.0)) {
    throw ConfigError("gamma_dot_d_max must lie in (0, 1)");
  }
  if (!(p_.gamma_ddot_d_max >= 0.0)) throw ConfigError("gamma_ddot_d_max must be >= 0");

  const double horizon = 2.0 * p_.ramp_end + 10.0;
  constexpr int kSamples = 20000;
  for (int k = 0; k <= kSamples; ++k) {
    const double t = horizon * k / kSamples;
    const double r = rate(t);
    if (std::abs(r - 1.0) > p_.gamma_dot_d_max) {
      throw ConfigError(fmt::format("desired rate {} at t={} violates |rate - 1| <= {}", r, t,
                                    p_.gamma_dot_d_max));
    }
    if (std::abs(accel(t)) > p_.gamma_ddot_d_max) {
      throw ConfigError(fmt::format("desired rate derivative {} at t={} exceeds {}", accel(t), t,
                                    p_.gamma_ddot_d_max));
    }
  }
}

double MissionRateProfile::rate(double t) const {
  if (t <= p_.ramp_start) return p_.base;
  if (t >= p_.ramp_end) return p_.final_rate;
  const double s = (t - p_.ramp_start) / (p_.ramp_end - p_.ramp_start);
  return p_.base + (p_.final_rate - p_.base) * s * s * (3.0 - 2.0 * s);
}

double MissionRateProfile::accel(double t) const {
  if (t <= p_.ramp_start || t >= p_.ramp_end) return 0.0;
  const double span = p_.ramp_end - p_.ramp_start;
  const double s = (t - p_.ramp_start) / span;
  return (p_.final_rate - p_.base) * 6.0 * s * (1.0 - s) / span;
}

double bar_alpha(const Eigen::Vector3d& traj_velocity, const Eigen::Vector3d& e_pf, double delta) {
  if (!(delta > 0.0)) throw ArgumentError(fmt::format("delta must be > 0, got {}", delta));
  return traj_velocity.dot(e_pf) / (traj_velocity.norm() + delta);
}

Eigen::VectorXd coordination_accel(const CoordinationState& state, const Digraph& topology,
                                   const Eigen::MatrixXd& e_pf,
                                   const Eigen::MatrixXd& traj_velocities,
                                   const MissionRateProfile& profile, double t,
                                   const CoordinationGains& gains) {
  const int n = topology.size();
  if (state.gamma.size() != n || state.gamma_dot.size() != n || e_pf.rows() != n ||
      e_pf.cols() != 3 || traj_velocities.rows() != n || traj_velocities.cols() != 3) {
    throw DimensionError(fmt::format("coordination inputs do not match topology order {}", n));
  }
  const double rate_d = profile.rate(t);
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    double consensus = 0.0;
    for (const auto& e : topology.edges()) {
      if (e.receiver == i + 1) consensus += state.gamma(i) - state.gamma(e.sender - 1);
    }
    const Eigen::Vector3d v = traj_velocities.row(i).transpose();
    const Eigen::Vector3d e = e_pf.row(i).transpose();
    out(i) = -gains.b * (state.gamma_dot(i) - rate_d) - gains.a * consensus -
             bar_alpha(v, e, gains.delta);
  }
  return out;
}

CoordinationError coordination_error(const CoordinationState& state, const ProjectionMatrix& q,
                                     double gamma_dot_d) {
  if (state.gamma.size() != q.order() || state.gamma_dot.size() != q.order()) {
    throw DimensionError("coordination state does not match projection order");
  }
  CoordinationError err;
  err.xi1 = q.matrix() * state.gamma;
  err.xi2 = state.gamma_dot - Eigen::VectorXd::Constant(state.gamma_dot.size(), gamma_dot_d);
  err.norm = std::sqrt(err.xi1.squaredNorm() + err.xi2.squaredNorm());
  return err;
}

std::vector<FeasibilityViolation> feasibility_check(const CoordinationState& state,
                                                    const Eigen::VectorXd& gamma_ddot,
                                                    const FeasibilityBounds& bounds, double t) {
  std::vector<FeasibilityViolation> out;
  const double lo = 1.0 - bounds.gamma_dot_max;
  const double hi = 1.0 + bounds.gamma_dot_max;
  for (Eigen::Index i = 0; i < state.gamma_dot.size(); ++i) {
    const double r = state.gamma_dot(i);
    if (r < lo || r > hi) out.push_back({static_cast<int>(i) + 1, t, "rate", r});
  }
  for (Eigen::Index i = 0; i < gamma_ddot.size(); ++i) {
    if (std::abs(gamma_ddot(i)) > bounds.gamma_ddot_max) {
      out.push_back({static_cast<int>(i) + 1, t, "accel", gamma_ddot(i)});
    }
  }
  return out;
}

}  // namespace coordsim
