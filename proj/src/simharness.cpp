#include "coordsim/simharness.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "coordsim/errors.hpp"

namespace coordsim {

namespace {

constexpr std::size_t kMaxStoredViolations = 1000;

Digraph make(int n, std::initializer_list<Edge> edges) { return Digraph(n, edges); }

}  // namespace

std::string to_string(ScenarioMode mode) {
  return mode == ScenarioMode::DirectedSwitched ? "directed-switched" : "bidirectional-random";
}

ScenarioMode parse_mode(const std::string& s) {
  if (s == "directed-switched") return ScenarioMode::DirectedSwitched;
  if (s == "bidirectional-random") return ScenarioMode::BidirectionalRandom;
  throw ConfigError(
      fmt::format("unknown mode '{}' (expected directed-switched or bidirectional-random)", s));
}

std::vector<Digraph> default_directed_family() {
  return {make(5, {{1, 3}, {4, 2}}), make(5, {{2, 3}, {5, 2}}), make(5, {{2, 3}, {4, 2}})};
}

std::vector<Digraph> default_bidirectional_family() {
  std::vector<Digraph> out;
  for (const auto& d : default_directed_family()) out.push_back(symmetrized(d));
  return out;
}

ScenarioConfig ScenarioConfig::reconnaissance(ScenarioMode mode) {
  ScenarioConfig c;
  c.n = 5;
  c.mode = mode;
  c.topology_family = mode == ScenarioMode::DirectedSwitched ? default_directed_family()
                                                             : default_bidirectional_family();
  c.mu_list = {0.2638, 0.2638, 0.2638};
  c.phi0 = Eigen::Vector4d(0.9, 1.7, 1.1, 0.1);
  for (int i = 1; i <= c.n; ++i) {
    const auto traj = Trajectory::reconnaissance(i);
    c.trajectories.push_back(traj.params());
    c.initial_positions.emplace_back(-2.0, traj.params().lateral_offset, 0.0);
  }
  c.rng_seed = 184;
  return c;
}

void validate(const ScenarioConfig& c) {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (c.n < 1) fail("n must be >= 1");
  if (c.topology_family.empty()) fail("topology_family is empty");
  for (std::size_t i = 0; i < c.topology_family.size(); ++i) {
    if (c.topology_family[i].size() != c.n) {
      fail(fmt::format("topology {} has order {}, expected n = {}", i + 1,
                       c.topology_family[i].size(), c.n));
    }
  }
  if (!(c.gains.a > 0.0) || !(c.gains.b > 0.0)) fail("gains a and b must be > 0");
  if (!(c.gains.delta > 0.0)) fail("delta must be > 0");
  if (!(c.dt > 0.0)) fail("dt must be > 0");
  if (!(c.t_max > 0.0)) fail("t_max must be > 0");
  if (!(c.feasibility.gamma_dot_max > 0.0 && c.feasibility.gamma_dot_max < 1.0)) {
    fail("feasibility gamma_dot_max must lie in (0, 1)");
  }
  if (!(c.feasibility.gamma_ddot_max > 0.0)) fail("feasibility gamma_ddot_max must be > 0");
  if (!(c.mission.gamma_dot_d_max < c.feasibility.gamma_dot_max)) {
    fail(fmt::format("gamma_dot_d_max {} must be below gamma_dot_max {}",
                     c.mission.gamma_dot_d_max, c.feasibility.gamma_dot_max));
  }
  if (!(c.tracking.kp > 0.0 && c.tracking.kd > 0.0 && c.tracking.a_max > 0.0 &&
        c.tracking.v_max > 0.0)) {
    fail("tracking gains kp, kd, a_max, v_max must be > 0");
  }
  if (!(c.rho > 0.0)) fail("rho must be > 0");
  if (static_cast<int>(c.trajectories.size()) != c.n) {
    fail(fmt::format("{} trajectories for {} vehicles", c.trajectories.size(), c.n));
  }
  if (static_cast<int>(c.initial_positions.size()) != c.n) {
    fail(fmt::format("{} initial positions for {} vehicles", c.initial_positions.size(), c.n));
  }
  for (const auto& g : c.disturbances) {
    if (g.vehicle < 1 || g.vehicle > c.n) fail(fmt::format("gust vehicle {} out of range", g.vehicle));
    if (!(g.t_start < g.t_end)) fail("gust window must have t_start < t_end");
  }
  if (!(c.pe_window > 0.0)) fail("pe_window must be > 0");
  if (c.output_stride < 1) fail("output_stride must be >= 1");

  if (c.mode == ScenarioMode::DirectedSwitched) {
    if (c.mu_list.size() != c.topology_family.size()) {
      fail(fmt::format("{} mu values for {} topologies", c.mu_list.size(),
                       c.topology_family.size()));
    }
    if (c.n >= 2) {
      if (c.phi0.size() != c.n - 1) {
        fail(fmt::format("phi0 has {} entries, expected {}", c.phi0.size(), c.n - 1));
      }
      if (c.phi0.squaredNorm() == 0.0) fail("phi0 must be nonzero");
    }
  } else {
    if (!(c.random_switch_period > 0.0)) fail("random_switch_period must be > 0");
    for (std::size_t i = 0; i < c.topology_family.size(); ++i) {
      if (!c.topology_family[i].is_symmetric()) {
        fail(fmt::format("baseline topology {} is not bidirectional", i + 1));
      }
    }
  }
}

int TopologySchedule::index_at(double t) const {
  auto k = static_cast<std::size_t>(std::floor(t / period + 1e-9));
  return indices[std::min(k, indices.size() - 1)];
}

TopologySchedule random_bidirectional_schedule(const std::vector<Digraph>& graphs, double period,
                                               std::uint64_t seed, double horizon) {
  if (graphs.empty()) throw ConfigError("baseline family is empty");
  if (!(period > 0.0)) throw ConfigError("random switch period must be > 0");
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    if (!graphs[i].is_symmetric()) {
      throw ConfigError(fmt::format("baseline topology {} is not bidirectional", i + 1));
    }
  }
  TopologySchedule s;
  s.period = period;
  const auto count = static_cast<std::size_t>(std::ceil(horizon / period)) + 1;
  std::mt19937_64 rng(seed);
  const auto m = static_cast<std::uint64_t>(graphs.size());
  s.indices.reserve(count);
  for (std::size_t k = 0; k < count; ++k) s.indices.push_back(static_cast<int>(rng() % m) + 1);
  return s;
}

Eigen::MatrixXd adjacency_integral(const MetricsLog& log, double until) {
  const int n = log.family.empty() ? 0 : log.family.front().size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (const auto& iv : log.topology_history) {
    const double len = std::min(iv.t_end, until) - iv.t_start;
    if (len > 0.0) out += len * adjacency(log.family[iv.index - 1]).cast<double>();
  }
  return out;
}

double communication_amount(const MetricsLog& log) {
  const double until = log.tau_f.value_or(log.t_end);
  double total = 0.0;
  for (const auto& iv : log.topology_history) {
    const double len = std::min(iv.t_end, until) - iv.t_start;
    if (len > 0.0) total += len * static_cast<double>(log.family[iv.index - 1].edge_count());
  }
  return total;
}

std::vector<std::pair<double, double>> pe_connectivity(const MetricsLog& log, double window,
                                                       const ProjectionMatrix& q,
                                                       double sample_step) {
  std::vector<std::pair<double, double>> series;
  if (log.topology_history.empty()) return series;
  const double t_end = log.topology_history.back().t_end;
  if (window > t_end) {
    spdlog::warn("PE window {} s exceeds run duration {} s; no samples", window, t_end);
    return series;
  }
  const int n = q.order();
  std::vector<Eigen::MatrixXd> lbar;
  for (const auto& d : log.family) {
    lbar.push_back(reduced_laplacian(q, laplacian(d).cast<double>()));
  }

  // lambda_min is concave in the (linear-in-t) window integral, so minima
  // between breakpoints cannot be missed by sampling at the breakpoints.
  std::vector<double> times;
  for (double t = window; t < t_end; t += sample_step) times.push_back(t);
  times.push_back(t_end);
  for (const auto& iv : log.topology_history) {
    for (double edge : {iv.t_start, iv.t_start + window}) {
      if (edge >= window && edge <= t_end) times.push_back(edge);
    }
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(),
                          [](double x, double y) { return std::abs(x - y) < 1e-12; }),
              times.end());

  const Eigen::Index k = n - 1;
  for (double t : times) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(k, k);
    const double lo = t - window;
    for (const auto& iv : log.topology_history) {
      const double len = std::min(iv.t_end, t) - std::max(iv.t_start, lo);
      if (len > 0.0) acc += len * lbar[iv.index - 1];
    }
    acc /= n * window;
    series.emplace_back(t, symmetric_eigenvalues(acc)(0));
  }
  return series;
}

Simulation::Simulation(ScenarioConfig config)
    : config_(std::move(config)), profile_(config_.mission) {
  validate(config_);
  for (const auto& p : config_.trajectories) trajectories_.emplace_back(p);

  if (!jointly_connected(config_.topology_family)) {
    throw SynthesisError(
        "family not jointly connected: union of topologies has no directed spanning tree");
  }
  if (config_.n >= 2) q_ = build_projection(config_.n);

  if (config_.mode == ScenarioMode::DirectedSwitched && config_.n >= 2) {
    cert_ = build_certificate(config_.topology_family, config_.mu_list, config_.gains.a,
                              config_.gains.b);
    if (config_.dt > cert_->eta / 10.0) {
      throw ConfigError(fmt::format("dt = {} exceeds eta / 10 = {:.6g}", config_.dt,
                                    cert_->eta / 10.0));
    }
  }
  if (config_.mode == ScenarioMode::BidirectionalRandom) {
    schedule_ = random_bidirectional_schedule(config_.topology_family,
                                              config_.random_switch_period, config_.rng_seed,
                                              config_.t_max + config_.dt);
  }

  double v_hi = 0.0;
  double v_lo = std::numeric_limits<double>::infinity();
  for (const auto& tr : trajectories_) {
    for (int k = 0; k <= 1000; ++k) {
      const double speed = tr.eval(tr.t_f() * k / 1000.0).velocity.norm();
      v_hi = std::max(v_hi, speed);
      v_lo = std::min(v_lo, speed);
    }
  }
  if (config_.gains.delta <= v_hi - v_lo) {
    spdlog::warn("delta = {} does not exceed trajectory speed spread {:.4g}", config_.gains.delta,
                 v_hi - v_lo);
  }
}

WorldState Simulation::initial_state() const {
  WorldState s;
  s.coord = CoordinationState::initial(config_.n);
  for (const auto& p0 : config_.initial_positions) s.vehicles.push_back({p0, Eigen::Vector3d::Zero()});
  s.arrived.assign(config_.n, false);
  if (cert_) s.switching = init_switching(config_.phi0, *cert_);
  s.sigma = active_topology(s);
  return s;
}

int Simulation::active_topology(const WorldState& s) const {
  if (s.switching) return s.switching->sigma;
  if (schedule_) return schedule_->index_at(s.t);
  return 1;
}

Eigen::VectorXd Simulation::derivative(const Eigen::VectorXd& x, const std::vector<bool>& arrived,
                                       int sigma, double t) const {
  const int n = config_.n;
  CoordinationState cs{x.segment(0, n), x.segment(n, n)};
  Eigen::MatrixXd e_pf(n, 3);
  Eigen::MatrixXd traj_vel(n, 3);
  std::vector<Trajectory::Sample> samples;
  samples.reserve(n);
  for (int i = 0; i < n; ++i) {
    samples.push_back(trajectories_[i].eval(cs.gamma(i)));
    e_pf.row(i) = (samples[i].position - x.segment<3>(2 * n + 3 * i)).transpose();
    traj_vel.row(i) = samples[i].velocity.transpose();
  }
  const Eigen::VectorXd gdd = coordination_accel(cs, config_.topology_family[sigma - 1], e_pf,
                                                 traj_vel, profile_, t, config_.gains);

  Eigen::VectorXd dx = Eigen::VectorXd::Zero(x.size());
  for (int i = 0; i < n; ++i) {
    if (arrived[i]) continue;
    dx(i) = cs.gamma_dot(i);
    dx(n + i) = gdd(i);
    VehicleState vs{x.segment<3>(2 * n + 3 * i), x.segment<3>(5 * n + 3 * i)};
    Eigen::Vector3d acc = pf_control(vs, samples[i].position,
                                     samples[i].velocity * cs.gamma_dot(i), config_.tracking);
    for (const auto& g : config_.disturbances) {
      if (g.vehicle == i + 1) acc = apply_disturbance(acc, g, t);
    }
    dx.segment<3>(2 * n + 3 * i) = vs.v;
    dx.segment<3>(5 * n + 3 * i) = acc;
  }
  return dx;
}

Eigen::VectorXd Simulation::gamma_ddot(const WorldState& s, int sigma) const {
  const int n = config_.n;
  Eigen::MatrixXd e_pf(n, 3);
  Eigen::MatrixXd traj_vel(n, 3);
  for (int i = 0; i < n; ++i) {
    const auto sample = trajectories_[i].eval(s.coord.gamma(i));
    e_pf.row(i) = (sample.position - s.vehicles[i].p).transpose();
    traj_vel.row(i) = sample.velocity.transpose();
  }
  Eigen::VectorXd gdd = coordination_accel(s.coord, config_.topology_family[sigma - 1], e_pf,
                                           traj_vel, profile_, s.t, config_.gains);
  for (int i = 0; i < n; ++i) {
    if (s.arrived[i]) gdd(i) = 0.0;
  }
  return gdd;
}

double Simulation::xi_norm(const WorldState& s) const {
  const double rate = profile_.rate(s.t);
  if (!q_) return std::abs(s.coord.gamma_dot(0) - rate);
  return coordination_error(s.coord, *q_, rate).norm;
}

Eigen::VectorXd Simulation::epf_norms(const WorldState& s) const {
  Eigen::VectorXd out(config_.n);
  for (int i = 0; i < config_.n; ++i) {
    out(i) = pf_error(trajectories_[i], s.coord.gamma(i), s.vehicles[i].p).norm();
  }
  return out;
}

WorldState Simulation::step(const WorldState& s, double dt) const {
  const int n = config_.n;
  const int sigma = active_topology(s);

  Eigen::VectorXd x(8 * n);
  x.segment(0, n) = s.coord.gamma;
  x.segment(n, n) = s.coord.gamma_dot;
  for (int i = 0; i < n; ++i) {
    x.segment<3>(2 * n + 3 * i) = s.vehicles[i].p;
    x.segment<3>(5 * n + 3 * i) = s.vehicles[i].v;
  }
  const Eigen::VectorXd k1 = derivative(x, s.arrived, sigma, s.t);
  const Eigen::VectorXd k2 = derivative(x + 0.5 * dt * k1, s.arrived, sigma, s.t + 0.5 * dt);
  const Eigen::VectorXd k3 = derivative(x + 0.5 * dt * k2, s.arrived, sigma, s.t + 0.5 * dt);
  const Eigen::VectorXd k4 = derivative(x + dt * k3, s.arrived, sigma, s.t + dt);
  x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  WorldState next = s;
  next.step_index = s.step_index + 1;
  next.t = static_cast<double>(next.step_index) * dt;
  next.coord.gamma = x.segment(0, n);
  next.coord.gamma_dot = x.segment(n, n);
  for (int i = 0; i < n; ++i) {
    next.vehicles[i].p = x.segment<3>(2 * n + 3 * i);
    next.vehicles[i].v = saturate_velocity(x.segment<3>(5 * n + 3 * i), config_.tracking.v_max);
  }

  if (next.switching) {
    next.switching->time = s.t;
    next.switching = advance(std::move(*next.switching), dt, config_.gains.a, config_.gains.b,
                             *cert_);
  }

  for (int i = 0; i < n; ++i) {
    const double t_f = trajectories_[i].t_f();
    if (!next.arrived[i] && next.coord.gamma(i) >= t_f) {
      next.coord.gamma(i) = t_f;
      next.arrived[i] = true;
    }
  }

  auto check = [&](const char* name, const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (!std::isfinite(v(i))) {
        throw NumericError(fmt::format("non-finite {}[{}] = {} at t = {:.6f} s", name, i + 1, v(i),
                                       next.t));
      }
    }
  };
  check("gamma", next.coord.gamma);
  check("gamma_dot", next.coord.gamma_dot);
  for (int i = 0; i < n; ++i) {
    check(fmt::format("p_{}", i + 1).c_str(), next.vehicles[i].p);
    check(fmt::format("v_{}", i + 1).c_str(), next.vehicles[i].v);
  }
  if (next.switching) check("phi", next.switching->phi);

  next.sigma = active_topology(next);
  return next;
}

RunResult run_scenario(const ScenarioConfig& config) {
  Simulation sim(config);
  RunResult result;
  result.certificate = sim.certificate();
  MetricsLog& log = result.log;
  log.family = config.topology_family;

  WorldState state = sim.initial_state();
  const auto total_steps = static_cast<long>(std::ceil(config.t_max / config.dt - 1e-9));

  auto record = [&](const WorldState& s) {
    StepRecord r;
    r.t = s.t;
    r.sigma = sim.active_topology(s);
    r.gamma = s.coord.gamma;
    r.gamma_dot = s.coord.gamma_dot;
    r.xi_norm = sim.xi_norm(s);
    for (const auto& v : s.vehicles) r.positions.push_back(v.p);
    r.epf_norm = sim.epf_norms(s);
    if (s.switching) r.aux_energy = aux_energy(s.switching->phi, *sim.certificate());

    const auto violations =
        feasibility_check(s.coord, sim.gamma_ddot(s, r.sigma), config.feasibility, s.t);
    log.violation_count += violations.size();
    for (const auto& v : violations) {
      if (log.violations.size() < kMaxStoredViolations) log.violations.push_back(v);
    }
    log.steps.push_back(std::move(r));
  };

  record(state);
  for (long k = 0; k < total_steps; ++k) {
    const int sigma = sim.active_topology(state);
    if (log.topology_history.empty() || log.topology_history.back().index != sigma) {
      if (!log.topology_history.empty()) {
        log.switches.push_back({state.t, log.topology_history.back().index, sigma});
      }
      log.topology_history.push_back({state.t, state.t, sigma});
    }
    state = sim.step(state, config.dt);
    log.topology_history.back().t_end = state.t;
    record(state);
    if (std::all_of(state.arrived.begin(), state.arrived.end(), [](bool b) { return b; })) {
      log.tau_f = state.t;
      break;
    }
  }
  log.t_end = state.t;

  if (state.switching) {
    // the law's own log also holds a switch decided on the final step
    log.switches = state.switching->switch_log;
  }
  if (!log.switches.empty()) {
    double prev = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& sw : log.switches) {
      best = std::min(best, sw.time - prev);
      prev = sw.time;
    }
    log.eta_observed = best;
  }

  for (const auto& iv : log.topology_history) {
    log.max_active_edges = std::max(log.max_active_edges, log.family[iv.index - 1].edge_count());
  }
  log.adjacency_integral = adjacency_integral(log, log.tau_f.value_or(log.t_end));
  log.comm_amount = communication_amount(log);
  if (config.n >= 2) {
    log.lambda_hat = pe_connectivity(log, config.pe_window, build_projection(config.n));
    if (!log.lambda_hat.empty()) {
      double mn = std::numeric_limits<double>::infinity();
      for (const auto& [t, v] : log.lambda_hat) mn = std::min(mn, v);
      log.lambda_hat_min = mn;
    }
  }
  log.final_xi_norm = log.steps.back().xi_norm;
  return result;
}

}  // namespace coordsim
