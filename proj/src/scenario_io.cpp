#include "coordsim/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "coordsim/errors.hpp"

namespace coordsim {

using nlohmann::json;

namespace {

std::string num(double v) { return fmt::format("{:.12g}", v); }

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json mat_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Eigen::VectorXd r = m.row(i).transpose();
    rows.push_back(vec_json(r));
  }
  return rows;
}

Eigen::Vector3d vec3(const json& j, const std::string& what) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 3) throw ConfigError(fmt::format("{} must have 3 entries", what));
  return {v[0], v[1], v[2]};
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json digraph_to_json(const Digraph& d) {
  json edges = json::array();
  for (const auto& e : d.edges()) edges.push_back({e.receiver, e.sender});
  return {{"n", d.size()}, {"edges", edges}};
}

Digraph digraph_from_json(const json& j) {
  const int n = j.at("n").get<int>();
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) {
    const auto pair = e.get<std::vector<int>>();
    if (pair.size() != 2) throw ConfigError("edge must be a [receiver, sender] pair");
    edges.push_back({pair[0], pair[1]});
  }
  try {
    return Digraph(n, std::move(edges));
  } catch (const ArgumentError& err) {
    throw ConfigError(fmt::format("invalid digraph: {}", err.what()));
  }
}

ScenarioConfig config_from_json(const json& j) {
  try {
    const auto mode = parse_mode(j.value("mode", std::string("directed-switched")));
    ScenarioConfig c = ScenarioConfig::reconnaissance(mode);
    const int n = j.value("n", 5);
    c.n = n;
    if (n != 5) {
      c.trajectories.clear();
      c.initial_positions.clear();
      for (int i = 1; i <= n; ++i) {
        const auto p = Trajectory::reconnaissance(i).params();
        c.trajectories.push_back(p);
        c.initial_positions.emplace_back(-2.0, p.lateral_offset, 0.0);
      }
      c.phi0 = Eigen::VectorXd::Ones(std::max(n - 1, 0));
    }
    if (j.contains("topology_family")) {
      c.topology_family.clear();
      for (const auto& d : j.at("topology_family")) c.topology_family.push_back(digraph_from_json(d));
    } else if (n != 5) {
      throw ConfigError("topology_family is required when n != 5");
    }
    if (j.contains("gains")) {
      const auto& g = j.at("gains");
      read(g, "a", c.gains.a);
      read(g, "b", c.gains.b);
      read(g, "delta", c.gains.delta);
    }
    if (j.contains("mu")) {
      c.mu_list = j.at("mu").get<std::vector<double>>();
    } else if (c.mu_list.size() != c.topology_family.size()) {
      c.mu_list.assign(c.topology_family.size(), c.mu_list.empty() ? 0.2638 : c.mu_list.front());
    }
    if (j.contains("phi0")) {
      const auto v = j.at("phi0").get<std::vector<double>>();
      c.phi0 = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    read(j, "dt", c.dt);
    read(j, "t_max", c.t_max);
    if (j.contains("mission_rate")) {
      const auto& m = j.at("mission_rate");
      read(m, "base", c.mission.base);
      read(m, "final", c.mission.final_rate);
      read(m, "ramp_start", c.mission.ramp_start);
      read(m, "ramp_end", c.mission.ramp_end);
      read(m, "gamma_dot_d_max", c.mission.gamma_dot_d_max);
      read(m, "gamma_ddot_d_max", c.mission.gamma_ddot_d_max);
    }
    if (j.contains("feasibility")) {
      read(j.at("feasibility"), "gamma_dot_max", c.feasibility.gamma_dot_max);
      read(j.at("feasibility"), "gamma_ddot_max", c.feasibility.gamma_ddot_max);
    }
    if (j.contains("vehicle")) {
      const auto& v = j.at("vehicle");
      read(v, "kp", c.tracking.kp);
      read(v, "kd", c.tracking.kd);
      read(v, "a_max", c.tracking.a_max);
      read(v, "v_max", c.tracking.v_max);
      read(v, "rho", c.rho);
    }
    if (j.contains("trajectories")) {
      c.trajectories.clear();
      for (const auto& t : j.at("trajectories")) {
        Trajectory::Params p;
        read(t, "lateral_offset", p.lateral_offset);
        read(t, "heading", p.heading);
        read(t, "decay", p.decay);
        read(t, "c0", p.c0);
        read(t, "c1", p.c1);
        read(t, "altitude", p.altitude);
        read(t, "t_f", p.t_f);
        c.trajectories.push_back(p);
      }
    }
    if (j.contains("initial_positions")) {
      c.initial_positions.clear();
      for (const auto& p : j.at("initial_positions")) {
        c.initial_positions.push_back(vec3(p, "initial position"));
      }
    }
    if (j.contains("disturbances")) {
      c.disturbances.clear();
      for (const auto& d : j.at("disturbances")) {
        Gust g;
        g.vehicle = d.at("vehicle").get<int>();
        g.accel = vec3(d.at("gust"), "gust");
        const auto w = d.at("window").get<std::vector<double>>();
        if (w.size() != 2) throw ConfigError("gust window must be [t_start, t_end]");
        g.t_start = w[0];
        g.t_end = w[1];
        c.disturbances.push_back(g);
      }
    }
    if (j.contains("baseline")) {
      read(j.at("baseline"), "rng_seed", c.rng_seed);
      read(j.at("baseline"), "random_switch_period", c.random_switch_period);
    }
    read(j, "pe_window", c.pe_window);
    read(j, "output_stride", c.output_stride);
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config: {}", e.what()));
  }
}

json config_to_json(const ScenarioConfig& c) {
  json family = json::array();
  for (const auto& d : c.topology_family) family.push_back(digraph_to_json(d));
  json trajectories = json::array();
  for (const auto& p : c.trajectories) {
    trajectories.push_back({{"lateral_offset", p.lateral_offset},
                            {"heading", p.heading},
                            {"decay", p.decay},
                            {"c0", p.c0},
                            {"c1", p.c1},
                            {"altitude", p.altitude},
                            {"t_f", p.t_f}});
  }
  json positions = json::array();
  for (const auto& p : c.initial_positions) positions.push_back({p.x(), p.y(), p.z()});
  json gusts = json::array();
  for (const auto& g : c.disturbances) {
    gusts.push_back({{"vehicle", g.vehicle},
                     {"gust", {g.accel.x(), g.accel.y(), g.accel.z()}},
                     {"window", {g.t_start, g.t_end}}});
  }
  return {
      {"n", c.n},
      {"mode", to_string(c.mode)},
      {"topology_family", family},
      {"gains", {{"a", c.gains.a}, {"b", c.gains.b}, {"delta", c.gains.delta}}},
      {"mu", c.mu_list},
      {"phi0", vec_json(c.phi0)},
      {"dt", c.dt},
      {"t_max", c.t_max},
      {"mission_rate",
       {{"base", c.mission.base},
        {"final", c.mission.final_rate},
        {"ramp_start", c.mission.ramp_start},
        {"ramp_end", c.mission.ramp_end},
        {"gamma_dot_d_max", c.mission.gamma_dot_d_max},
        {"gamma_ddot_d_max", c.mission.gamma_ddot_d_max}}},
      {"feasibility",
       {{"gamma_dot_max", c.feasibility.gamma_dot_max},
        {"gamma_ddot_max", c.feasibility.gamma_ddot_max}}},
      {"vehicle",
       {{"kp", c.tracking.kp},
        {"kd", c.tracking.kd},
        {"a_max", c.tracking.a_max},
        {"v_max", c.tracking.v_max},
        {"rho", c.rho}}},
      {"trajectories", trajectories},
      {"initial_positions", positions},
      {"disturbances", gusts},
      {"baseline", {{"rng_seed", c.rng_seed}, {"random_switch_period", c.random_switch_period}}},
      {"pe_window", c.pe_window},
      {"output_stride", c.output_stride},
  };
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(
        fmt::format("{}: parse error at byte {}: {}", path.string(), e.byte, e.what()));
  }
  return config_from_json(j);
}

json certificate_to_json(const SwitchingCertificate& cert, double a, double b) {
  json h_spectra = json::array();
  json lbar_spectra = json::array();
  for (int i = 0; i < cert.m; ++i) {
    h_spectra.push_back(vec_json(symmetric_eigenvalues(cert.h_list[i])));
    json evs = json::array();
    for (const auto& ev : eigenvalues(cert.lbar_list[i])) evs.push_back({ev.real(), ev.imag()});
    lbar_spectra.push_back(evs);
  }
  json gains = json::array();
  const auto report = validate_gains(a, b, cert);
  for (const auto& g : report.inequalities) {
    gains.push_back({{"name", g.name}, {"lhs", g.lhs}, {"rhs", g.rhs}, {"pass", g.pass}});
  }
  return {
      {"n", cert.n},
      {"m", cert.m},
      {"P", mat_json(cert.p)},
      {"P_spectrum", vec_json(symmetric_eigenvalues(cert.p))},
      {"lyapunov_residual", lyapunov_residual(cert.lbar_union, cert.m, cert.p)},
      {"H_spectra", h_spectra},
      {"Lbar_spectra", lbar_spectra},
      {"mu", cert.mu_list},
      {"mu_upper", 1.0 / cert.lambda_max_p},
      {"eta", cert.eta},
      {"k_phi", cert.k_phi},
      {"M", cert.big_m},
      {"mu_min", cert.mu_min},
      {"lambda_tc_bound", convergence_rate_bound(a, b, cert)},
      {"gain_report", {{"pass", report.pass}, {"inequalities", gains}}},
  };
}

json summary_to_json(const ScenarioConfig& config, const RunResult& result) {
  const auto& log = result.log;
  json violation;
  if (!log.violations.empty()) {
    const auto& v = log.violations.front();
    violation = {{"vehicle", v.vehicle}, {"time", v.time}, {"bound", v.bound}, {"value", v.value}};
  }
  double max_epf_late = 0.0;
  for (const auto& s : log.steps) {
    if (s.t >= 10.0) max_epf_late = std::max(max_epf_late, s.epf_norm.norm());
  }
  return {
      {"mode", to_string(config.mode)},
      {"n", config.n},
      {"arrived", log.tau_f.has_value()},
      {"tau_f", optional_json(log.tau_f)},
      {"t_end", log.t_end},
      {"comm_amount", log.comm_amount},
      {"adjacency_integral", mat_json(log.adjacency_integral)},
      {"eta", result.certificate ? json(result.certificate->eta) : json(nullptr)},
      {"eta_observed", optional_json(log.eta_observed)},
      {"switch_count", log.switches.size()},
      {"max_active_edges", log.max_active_edges},
      {"lambda_hat_min", optional_json(log.lambda_hat_min)},
      {"final_xi_norm", log.final_xi_norm},
      {"max_epf_after_10s", max_epf_late},
      {"feasibility_violations", log.violation_count},
      {"first_violation", violation},
  };
}

void write_metrics_csv(std::ostream& os, const MetricsLog& log, int stride) {
  if (log.steps.empty()) return;
  const auto n = log.steps.front().gamma.size();
  os << "t";
  for (Eigen::Index i = 1; i <= n; ++i) os << ",gamma_" << i;
  for (Eigen::Index i = 1; i <= n; ++i) os << ",gamma_dot_" << i;
  os << ",xi_norm\n";
  for (std::size_t k = 0; k < log.steps.size(); ++k) {
    if (k % stride != 0 && k + 1 != log.steps.size()) continue;
    const auto& s = log.steps[k];
    os << num(s.t);
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << num(s.gamma(i));
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << num(s.gamma_dot(i));
    os << ',' << num(s.xi_norm) << '\n';
  }
}

void write_vehicles_csv(std::ostream& os, const MetricsLog& log, int stride) {
  os << "t,veh_id,px,py,pz,epf_norm\n";
  for (std::size_t k = 0; k < log.steps.size(); ++k) {
    if (k % stride != 0 && k + 1 != log.steps.size()) continue;
    const auto& s = log.steps[k];
    for (std::size_t i = 0; i < s.positions.size(); ++i) {
      const auto& p = s.positions[i];
      os << num(s.t) << ',' << i + 1 << ',' << num(p.x()) << ',' << num(p.y()) << ','
         << num(p.z()) << ',' << num(s.epf_norm(static_cast<Eigen::Index>(i))) << '\n';
    }
  }
}

void write_switches_csv(std::ostream& os, const MetricsLog& log) {
  os << "time,old_sigma,new_sigma\n";
  for (const auto& sw : log.switches) {
    os << num(sw.time) << ',' << sw.old_sigma << ',' << sw.new_sigma << '\n';
  }
}

void write_lambda_hat_csv(std::ostream& os, const MetricsLog& log) {
  os << "t,lambda_hat\n";
  for (const auto& [t, v] : log.lambda_hat) os << num(t) << ',' << num(v) << '\n';
}

void write_outputs(const std::filesystem::path& dir, const ScenarioConfig& config,
                   const RunResult& result) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw ConfigError(fmt::format("cannot write '{}'", (dir / name).string()));
    return f;
  };
  {
    auto f = open("metrics.csv");
    write_metrics_csv(f, result.log, config.output_stride);
  }
  {
    auto f = open("vehicles.csv");
    write_vehicles_csv(f, result.log, config.output_stride);
  }
  {
    auto f = open("switches.csv");
    write_switches_csv(f, result.log);
  }
  {
    auto f = open("lambda_hat.csv");
    write_lambda_hat_csv(f, result.log);
  }
  {
    auto f = open("summary.json");
    f << summary_to_json(config, result).dump(2) << '\n';
  }
}

}  // namespace coordsim
