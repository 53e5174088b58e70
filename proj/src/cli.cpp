#include "coordsim/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <future>
#include <optional>

#include <fmt/format.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "coordsim/errors.hpp"
#include "coordsim/scenario_io.hpp"

namespace coordsim::cli {

using nlohmann::json;

namespace {

struct Options {
  std::string config;
  std::string baseline;
  std::string out;
  bool json_output = false;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
};

ScenarioConfig load_with_overrides(const std::string& path, const Options& o) {
  ScenarioConfig c = load_config(path);
  if (o.seed) c.rng_seed = *o.seed;
  if (o.dt) c.dt = *o.dt;
  return c;
}

/// Maps library exceptions onto the exit-code contract.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const SynthesisError& e) {
    err << "synthesis error: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "io error: " << e.what() << '\n';
    return kValidationFailure;
  }
}

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<Check> checks;
  std::optional<ScenarioConfig> config;
  try {
    config = load_with_overrides(o.config, o);
    validate(*config);
    checks.push_back({"config", true, "structurally valid"});
  } catch (const ConfigError& e) {
    checks.push_back({"config", false, e.what()});
  }

  if (config && checks.back().pass) {
    const auto& c = *config;
    const bool joint = jointly_connected(c.topology_family);
    checks.push_back({"joint connectivity", joint,
                      joint ? "union of topologies contains a directed spanning tree"
                            : "joint connectivity assumption violated: union of topologies has no directed "
                              "spanning tree"});
    for (std::size_t i = 0; i < c.topology_family.size(); ++i) {
      const bool tree = contains_spanning_tree(c.topology_family[i]);
      checks.push_back({fmt::format("topology {} spanning tree", i + 1), true,
                        tree ? "contains a directed spanning tree" : "no spanning tree"});
    }
    if (joint && c.mode == ScenarioMode::DirectedSwitched && c.n >= 2) {
      try {
        const auto cert = build_certificate(c.topology_family, c.mu_list, c.gains.a, c.gains.b);
        checks.push_back({"mu range", true,
                          fmt::format("all mu_i in (0, {:.10g})", 1.0 / cert.lambda_max_p)});
        const bool dt_ok = c.dt <= cert.eta / 10.0;
        checks.push_back(
            {"dt vs dwell time", dt_ok, fmt::format("dt = {} , eta / 10 = {:.6g}", c.dt, cert.eta / 10.0)});
      } catch (const std::exception& e) {
        checks.push_back({"mu range", false, e.what()});
      }
    }
  }

  bool ok = true;
  for (const auto& ch : checks) ok = ok && ch.pass;
  if (o.json_output) {
    json arr = json::array();
    for (const auto& ch : checks) {
      arr.push_back({{"name", ch.name}, {"pass", ch.pass}, {"detail", ch.detail}});
    }
    out << json{{"valid", ok}, {"checks", arr}}.dump(2) << '\n';
  } else {
    for (const auto& ch : checks) {
      out << fmt::format("[{}] {}: {}\n", ch.pass ? "ok" : "FAIL", ch.name, ch.detail);
    }
    out << (ok ? "config valid\n" : "config invalid\n");
  }
  if (!ok) err << "validation failed\n";
  return ok ? kSuccess : kValidationFailure;
}

int cmd_analyze(const Options& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto c = load_with_overrides(o.config, o);
    validate(c);
    const auto cert = build_certificate(c.topology_family, c.mu_list, c.gains.a, c.gains.b);
    const json doc = certificate_to_json(cert, c.gains.a, c.gains.b);
    if (o.json_output) {
      out << doc.dump(2) << '\n';
      return kSuccess;
    }
    out << fmt::format("topologies m = {}, vehicles n = {}\n", cert.m, cert.n);
    out << "P spectrum:";
    for (double v : doc["P_spectrum"]) out << fmt::format(" {:.6g}", v);
    out << '\n';
    for (int i = 0; i < cert.m; ++i) {
      out << fmt::format("H_{} spectrum:", i + 1);
      for (double v : doc["H_spectra"][i]) out << fmt::format(" {:.6g}", v);
      out << '\n';
    }
    out << fmt::format("mu admissible interval: (0, {:.10g})\n", 1.0 / cert.lambda_max_p);
    out << fmt::format("eta      = {:.6g} s\n", cert.eta);
    out << fmt::format("k_phi    = {:.6g}\n", cert.k_phi);
    out << fmt::format("M        = {:.6g}\n", cert.big_m);
    out << fmt::format("lambda_TC bound = {:.6g} 1/s\n", convergence_rate_bound(c.gains.a, c.gains.b, cert));
    for (const auto& g : doc["gain_report"]["inequalities"]) {
      out << fmt::format("[{}] {}: {:.6g} vs {:.6g}\n", g["pass"].get<bool>() ? "ok" : "FAIL",
                         g["name"].get<std::string>(), g["lhs"].get<double>(),
                         g["rhs"].get<double>());
    }
    return kSuccess;
  });
}

int run_exit_code(const RunResult& r, std::ostream& err) {
  if (r.log.violation_count == 0) return kSuccess;
  const auto& v = r.log.violations.front();
  err << fmt::format("feasibility violation: vehicle {} {} bound, value {:.6g} at t = {:.4f} s\n",
                     v.vehicle, v.bound, v.value, v.time);
  return kValidationFailure;
}

void print_summary(std::ostream& out, const json& s) {
  auto opt = [](const json& v) { return v.is_null() ? std::string("-") : fmt::format("{:.6g}", v.get<double>()); };
  out << fmt::format("mode            {}\n", s["mode"].get<std::string>());
  out << fmt::format("tau_f           {}\n", opt(s["tau_f"]));
  out << fmt::format("comm_amount     {:.6g}\n", s["comm_amount"].get<double>());
  out << fmt::format("final xi norm   {:.6g}\n", s["final_xi_norm"].get<double>());
  out << fmt::format("eta observed    {}\n", opt(s["eta_observed"]));
  out << fmt::format("lambda_hat_min  {}\n", opt(s["lambda_hat_min"]));
  out << fmt::format("violations      {}\n", s["feasibility_violations"].get<std::size_t>());
}

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto c = load_with_overrides(o.config, o);
    const auto result = run_scenario(c);
    write_outputs(o.out, c, result);
    const json summary = summary_to_json(c, result);
    if (o.json_output) {
      out << summary.dump(2) << '\n';
    } else {
      print_summary(out, summary);
    }
    return run_exit_code(result, err);
  });
}

int cmd_compare(const Options& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto directed = load_with_overrides(o.config, o);
    const auto baseline = load_with_overrides(o.baseline, o);
    if (directed.n != baseline.n) {
      throw ConfigError(fmt::format("configs disagree on n: {} vs {}", directed.n, baseline.n));
    }
    auto fut = std::async(std::launch::async, [&] { return run_scenario(baseline); });
    const auto r_dir = run_scenario(directed);
    const auto r_base = fut.get();

    const std::filesystem::path root(o.out);
    write_outputs(root / "directed", directed, r_dir);
    write_outputs(root / "bidirectional", baseline, r_base);

    const json s_dir = summary_to_json(directed, r_dir);
    const json s_base = summary_to_json(baseline, r_base);
    const double ratio = r_base.log.comm_amount > 0.0
                             ? r_dir.log.comm_amount / r_base.log.comm_amount
                             : std::numeric_limits<double>::quiet_NaN();
    json doc = {{"directed", s_dir},
                {"bidirectional", s_base},
                {"comm_ratio", std::isfinite(ratio) ? json(ratio) : json(nullptr)}};
    {
      std::ofstream f(root / "comparison.json");
      f << doc.dump(2) << '\n';
    }
    if (o.json_output) {
      out << doc.dump(2) << '\n';
    } else {
      auto tau = [](const json& s) {
        return s["tau_f"].is_null() ? std::string("-") : fmt::format("{:.2f}", s["tau_f"].get<double>());
      };
      out << fmt::format("{:<34}| {:>12} | {:>12}\n", "", "directed", "bidirectional");
      out << fmt::format("{:<34}| {:>12.2f} | {:>12.2f}\n", "amount of inter-vehicle comm.",
                         s_dir["comm_amount"].get<double>(), s_base["comm_amount"].get<double>());
      out << fmt::format("{:<34}| {:>12} | {:>12}\n", "arrival time tau_f [s]", tau(s_dir), tau(s_base));
      out << fmt::format("{:<34}| {:>12.3e} | {:>12.3e}\n", "final coordination error",
                         s_dir["final_xi_norm"].get<double>(), s_base["final_xi_norm"].get<double>());
      out << fmt::format("communication ratio: {:.4f}\n", ratio);
    }
    const int a = run_exit_code(r_dir, err);
    const int b = run_exit_code(r_base, err);
    return std::max(a, b);
  });
}

}  // namespace

void configure_logging() {
  static const bool once = [] {
    auto logger = spdlog::stderr_logger_mt("coordsim");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("COORDSIM_LOG")) {
      spdlog::set_level(spdlog::level::from_str(env));
    }
    return true;
  }();
  (void)once;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  configure_logging();
  CLI::App app{"Time coordination of multiple vehicles over switched directed topologies"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("--config", o.config, "scenario JSON")->required()->check(CLI::ExistingFile);
    sub->add_flag("--json", o.json_output, "emit one JSON document on stdout");
    sub->add_option("--dt", o.dt, "override integration step [s]");
    sub->add_option("--seed", o.seed, "override baseline RNG seed");
    if (needs_out) sub->add_option("--out", o.out, "output directory")->required();
  };
  auto* validate_cmd = app.add_subcommand("validate", "check a scenario config");
  add_common(validate_cmd, false);
  auto* analyze_cmd = app.add_subcommand("analyze", "synthesize and print the switching certificate");
  add_common(analyze_cmd, false);
  auto* run_cmd = app.add_subcommand("run", "simulate one scenario");
  add_common(run_cmd, true);
  auto* compare_cmd = app.add_subcommand("compare", "directed vs bidirectional communication cost");
  add_common(compare_cmd, true);
  compare_cmd->add_option("--baseline", o.baseline, "bidirectional baseline config")
      ->required()
      ->check(CLI::ExistingFile);

  std::vector<std::string> argv_store;
  argv_store.emplace_back("coordsim");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kValidationFailure;
  }

  if (validate_cmd->parsed()) return cmd_validate(o, out, err);
  if (analyze_cmd->parsed()) return cmd_analyze(o, out, err);
  if (run_cmd->parsed()) return cmd_run(o, out, err);
  return cmd_compare(o, out, err);
}

}  // namespace coordsim::cli
