#pragma once

#include <vector>

#include <Eigen/Core>

#include "coordsim/coordalg.hpp"

namespace coordsim {

struct SwitchEvent {
  double time = 0.0;
  int old_sigma = 0;
  int new_sigma = 0;
};

/// Auxiliary-system state driving topology selection.
struct SwitchingState {
  Eigen::VectorXd phi;
  int sigma = 1;  // active topology, 1-based
  double time = 0.0;
  double t_last_switch = 0.0;
  std::vector<SwitchEvent> switch_log;
};

/// Smallest index attaining min_i phi^T H_i phi. Ties are resolved with a
/// tolerance of 1e-12 relative to phi^T phi.
int select_topology(const Eigen::VectorXd& phi, const SwitchingCertificate& cert);

/// phi^T H_sigma phi > -mu_sigma lambda_max(P) phi^T phi (strict).
bool threshold_exceeded(const Eigen::VectorXd& phi, int sigma, const SwitchingCertificate& cert);

SwitchingState init_switching(const Eigen::VectorXd& phi0, const SwitchingCertificate& cert);

/// One RK4 step of phi' = -(a/b) Lbar_sigma phi with sigma held, then the
/// threshold check; a switch takes effect at the step boundary.
SwitchingState advance(SwitchingState state, double dt, double a, double b,
                       const SwitchingCertificate& cert);

/// phi^T P phi.
double aux_energy(const Eigen::VectorXd& phi, const SwitchingCertificate& cert);

}  // namespace coordsim
