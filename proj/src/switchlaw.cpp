#include "coordsim/switchlaw.hpp"

#include <limits>

#include <fmt/format.h>

#include "coordsim/errors.hpp"

namespace coordsim {

namespace {

void check_phi(const Eigen::VectorXd& phi, const SwitchingCertificate& cert) {
  if (phi.size() != cert.n - 1) {
    throw DimensionError(fmt::format("phi has {} entries, expected {}", phi.size(), cert.n - 1));
  }
}

}  // namespace

int select_topology(const Eigen::VectorXd& phi, const SwitchingCertificate& cert) {
  check_phi(phi, cert);
  std::vector<double> values;
  values.reserve(cert.h_list.size());
  double best = std::numeric_limits<double>::infinity();
  for (const auto& h : cert.h_list) {
    values.push_back(phi.dot(h * phi));
    best = std::min(best, values.back());
  }
  const double tol = 1e-12 * phi.squaredNorm();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] <= best + tol) return static_cast<int>(i) + 1;
  }
  return 1;
}

bool threshold_exceeded(const Eigen::VectorXd& phi, int sigma, const SwitchingCertificate& cert) {
  const auto i = static_cast<std::size_t>(sigma - 1);
  const double quad = phi.dot(cert.h_list[i] * phi);
  return quad > -cert.mu_list[i] * cert.lambda_max_p * phi.squaredNorm();
}

SwitchingState init_switching(const Eigen::VectorXd& phi0, const SwitchingCertificate& cert) {
  check_phi(phi0, cert);
  if (phi0.squaredNorm() == 0.0) throw ArgumentError("phi0 must be nonzero");
  SwitchingState s;
  s.phi = phi0;
  s.sigma = select_topology(phi0, cert);
  return s;
}

SwitchingState advance(SwitchingState state, double dt, double a, double b,
                       const SwitchingCertificate& cert) {
  const Eigen::MatrixXd sys = -(a / b) * cert.lbar_list[state.sigma - 1];
  const Eigen::VectorXd& y = state.phi;
  const Eigen::VectorXd k1 = sys * y;
  const Eigen::VectorXd k2 = sys * (y + 0.5 * dt * k1);
  const Eigen::VectorXd k3 = sys * (y + 0.5 * dt * k2);
  const Eigen::VectorXd k4 = sys * (y + dt * k3);
  state.phi = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  state.time += dt;

  if (threshold_exceeded(state.phi, state.sigma, cert)) {
    const int next = select_topology(state.phi, cert);
    state.switch_log.push_back({state.time, state.sigma, next});
    state.sigma = next;
    state.t_last_switch = state.time;
  }
  return state;
}

double aux_energy(const Eigen::VectorXd& phi, const SwitchingCertificate& cert) {
  return phi.dot(cert.p * phi);
}

}  // namespace coordsim
