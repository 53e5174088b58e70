#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "coordsim/coordalg.hpp"
#include "coordsim/coordctrl.hpp"
#include "coordsim/digraph.hpp"
#include "coordsim/switchlaw.hpp"
#include "coordsim/vehicle.hpp"

namespace coordsim {

enum class ScenarioMode { DirectedSwitched, BidirectionalRandom };

std::string to_string(ScenarioMode mode);
ScenarioMode parse_mode(const std::string& s);

struct ScenarioConfig {
  int n = 5;
  std::vector<Digraph> topology_family;
  ScenarioMode mode = ScenarioMode::DirectedSwitched;
  CoordinationGains gains;
  std::vector<double> mu_list;
  Eigen::VectorXd phi0;
  double dt = 1e-3;
  double t_max = 60.0;
  MissionRateProfile::Params mission;
  FeasibilityBounds feasibility;
  TrackingGains tracking;
  double rho = 0.5;
  std::vector<Trajectory::Params> trajectories;
  std::vector<Eigen::Vector3d> initial_positions;
  std::vector<Gust> disturbances;
  std::uint64_t rng_seed = 0;
  double random_switch_period = 0.3;
  double pe_window = 3.4;
  int output_stride = 10;

  /// Five-vehicle reconnaissance mission with the default directed family
  /// D1 = {1<-3, 4<-2}, D2 = {2<-3, 5<-2}, D3 = {2<-3, 4<-2}, or in baseline
  /// mode the symmetrized counterparts switched at random.
  static ScenarioConfig reconnaissance(ScenarioMode mode = ScenarioMode::DirectedSwitched);
};

/// Structural checks; throws ConfigError. Joint connectivity and the dwell
/// time condition are checked when the scenario is synthesized.
void validate(const ScenarioConfig& config);

std::vector<Digraph> default_directed_family();
std::vector<Digraph> default_bidirectional_family();

/// Seeded i.i.d. uniform topology choice per period (1-based indices).
struct TopologySchedule {
  double period = 0.3;
  std::vector<int> indices;

  int index_at(double t) const;
};

TopologySchedule random_bidirectional_schedule(const std::vector<Digraph>& graphs, double period,
                                               std::uint64_t seed, double horizon);

struct TopologyInterval {
  double t_start = 0.0;
  double t_end = 0.0;
  int index = 1;  // 1-based into the family
};

struct StepRecord {
  double t = 0.0;
  int sigma = 1;
  Eigen::VectorXd gamma;
  Eigen::VectorXd gamma_dot;
  double xi_norm = 0.0;
  std::vector<Eigen::Vector3d> positions;
  Eigen::VectorXd epf_norm;
  double aux_energy = 0.0;  // phi^T P phi; 0 without a switching law
};

struct MetricsLog {
  std::vector<Digraph> family;
  std::vector<StepRecord> steps;
  std::vector<TopologyInterval> topology_history;
  std::vector<SwitchEvent> switches;
  Eigen::MatrixXd adjacency_integral;
  double comm_amount = 0.0;
  double t_end = 0.0;
  std::optional<double> tau_f;  // empty: not all vehicles arrived
  std::optional<double> eta_observed;
  std::vector<std::pair<double, double>> lambda_hat;
  std::optional<double> lambda_hat_min;
  std::vector<FeasibilityViolation> violations;  // first 1000
  std::size_t violation_count = 0;
  double final_xi_norm = 0.0;
  std::size_t max_active_edges = 0;
};

/// Time integral of the adjacency matrix over the recorded topology history up to `until`.
Eigen::MatrixXd adjacency_integral(const MetricsLog& log, double until);

/// Sum of all adjacency-integral entries up to tau_f (or the end of the run).
double communication_amount(const MetricsLog& log);

/// lambda_min of the symmetrized (1/nT) integral of Q L Q^T over [t - T, t].
/// Samples every `sample_step` seconds plus at every window breakpoint, for t in [T, t_end].
std::vector<std::pair<double, double>> pe_connectivity(const MetricsLog& log, double window,
                                                       const ProjectionMatrix& q,
                                                       double sample_step = 0.1);

/// Everything that is continuous-time integrated or switched per step.
struct WorldState {
  long step_index = 0;
  double t = 0.0;
  CoordinationState coord;
  std::vector<VehicleState> vehicles;
  std::vector<bool> arrived;
  std::optional<SwitchingState> switching;
  int sigma = 1;
};

/// Immutable run context: configuration plus synthesized certificate.
class Simulation {
 public:
  /// Validates and synthesizes; throws ConfigError / SynthesisError before any stepping.
  explicit Simulation(ScenarioConfig config);

  const ScenarioConfig& config() const { return config_; }
  const std::optional<SwitchingCertificate>& certificate() const { return cert_; }
  const std::vector<Trajectory>& trajectories() const { return trajectories_; }
  const MissionRateProfile& profile() const { return profile_; }
  const std::optional<TopologySchedule>& schedule() const { return schedule_; }

  WorldState initial_state() const;

  /// Topology used over the step starting at `s`.
  int active_topology(const WorldState& s) const;

  /// One RK4 step of (gamma, gamma_dot, p, v) with the active topology held,
  /// then the switching-law check, velocity saturation and arrival clamping.
  WorldState step(const WorldState& s, double dt) const;

  /// Coordination acceleration at the given state (arrived vehicles: 0).
  Eigen::VectorXd gamma_ddot(const WorldState& s, int sigma) const;

  double xi_norm(const WorldState& s) const;
  Eigen::VectorXd epf_norms(const WorldState& s) const;

 private:
  Eigen::VectorXd derivative(const Eigen::VectorXd& x, const std::vector<bool>& arrived,
                             int sigma, double t) const;

  ScenarioConfig config_;
  MissionRateProfile profile_;
  std::vector<Trajectory> trajectories_;
  std::optional<SwitchingCertificate> cert_;
  std::optional<ProjectionMatrix> q_;
  std::optional<TopologySchedule> schedule_;
};

struct RunResult {
  std::optional<SwitchingCertificate> certificate;
  MetricsLog log;
};

RunResult run_scenario(const ScenarioConfig& config);

}  // namespace coordsim
