#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "coordsim/cli.hpp"
#include "coordsim/scenario_io.hpp"

using namespace coordsim;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = COORDSIM_CONFIG_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "coordsim_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_json(const fs::path& dir, const std::string& name, const json& j) {
  const fs::path p = dir / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("shipped configs match the built-in defaults") {
  const auto d = load_config(kConfigs / "directed.json");
  CHECK(config_to_json(d) == config_to_json(ScenarioConfig::reconnaissance()));
  const auto b = load_config(kConfigs / "bidirectional.json");
  CHECK(config_to_json(b) ==
        config_to_json(ScenarioConfig::reconnaissance(ScenarioMode::BidirectionalRandom)));
}

TEST_CASE("config JSON round-trips") {
  auto c = ScenarioConfig::reconnaissance();
  c.disturbances.push_back({3, Eigen::Vector3d(0.1, -0.2, 0.0), 12.0, 14.5});
  c.rng_seed = 99;
  const json j = config_to_json(c);
  CHECK(config_to_json(config_from_json(j)) == j);
  CHECK(digraph_from_json(digraph_to_json(c.topology_family[1])) == c.topology_family[1]);
}

TEST_CASE("validate") {
  const auto ok = invoke({"validate", "--config", (kConfigs / "directed.json").string()});
  CHECK(ok.code == cli::kSuccess);
  CHECK(ok.out.find("config valid") != std::string::npos);

  const auto dir = scratch("validate");
  SUBCASE("malformed JSON") {
    const fs::path p = dir / "bad.json";
    std::ofstream(p) << "{\"n\": 5,, }";
    const auto r = invoke({"validate", "--config", p.string()});
    CHECK(r.code == cli::kValidationFailure);
    CHECK(r.out.find("byte") != std::string::npos);
  }
  SUBCASE("missing file") {
    CHECK(invoke({"validate", "--config", (dir / "nope.json").string()}).code ==
          cli::kValidationFailure);
  }
  SUBCASE("disconnected family") {
    auto c = ScenarioConfig::reconnaissance();
    c.topology_family = {c.topology_family[0], c.topology_family[2]};
    c.mu_list = {0.2, 0.2};
    const auto p = write_json(dir, "disc.json", config_to_json(c));
    const auto r = invoke({"validate", "--config", p.string()});
    CHECK(r.code == cli::kValidationFailure);
    CHECK(r.out.find("joint connectivity assumption") != std::string::npos);
    CHECK(invoke({"analyze", "--config", p.string()}).code == cli::kNumericFailure);
    CHECK(invoke({"run", "--config", p.string(), "--out", (dir / "o").string()}).code ==
          cli::kNumericFailure);
  }
  SUBCASE("mu on the open-interval boundary") {
    auto c = ScenarioConfig::reconnaissance();
    const auto cert = build_certificate(c.topology_family, c.mu_list, c.gains.a, c.gains.b);
    c.mu_list[1] = 1.0 / cert.lambda_max_p;
    const auto p = write_json(dir, "mu.json", config_to_json(c));
    CHECK(invoke({"validate", "--config", p.string()}).code == cli::kValidationFailure);
    CHECK(invoke({"analyze", "--config", p.string()}).code == cli::kValidationFailure);
  }
  SUBCASE("json output") {
    const auto r = invoke({"validate", "--json", "--config", (kConfigs / "directed.json").string()});
    const json doc = json::parse(r.out);
    CHECK(doc["valid"] == true);
    CHECK(doc["checks"].size() >= 5);
  }
  SUBCASE("dt override breaking the dwell-time margin") {
    const auto r = invoke({"validate", "--dt", "0.05", "--config", (kConfigs / "directed.json").string()});
    CHECK(r.code == cli::kValidationFailure);
  }
}

TEST_CASE("analyze") {
  const auto text = invoke({"analyze", "--config", (kConfigs / "directed.json").string()});
  CHECK(text.code == cli::kSuccess);
  CHECK(text.out.find("eta") != std::string::npos);

  const auto r = invoke({"analyze", "--json", "--config", (kConfigs / "directed.json").string()});
  REQUIRE(r.code == cli::kSuccess);
  const json doc = json::parse(r.out);
  for (const char* key : {"P", "P_spectrum", "H_spectra", "eta", "k_phi", "M", "lambda_tc_bound",
                          "gain_report", "lyapunov_residual"}) {
    CHECK(doc.contains(key));
  }
  CHECK(doc["eta"].get<double>() > 0.0);
  CHECK(doc["lyapunov_residual"].get<double>() <= 1e-10);

  SUBCASE("single identity-like topology") {
    const auto dir = scratch("analyze");
    auto c = ScenarioConfig::reconnaissance();
    c.n = 2;
    c.topology_family = {Digraph(2, {{2, 1}})};
    c.mu_list = {0.5};
    c.phi0 = Eigen::VectorXd::Ones(1);
    c.trajectories.resize(2);
    c.initial_positions.resize(2);
    const auto p = write_json(dir, "m1.json", config_to_json(c));
    const auto a = invoke({"analyze", "--json", "--config", p.string()});
    REQUIRE(a.code == cli::kSuccess);
    // Lbar = [1], m = 1: P = 1/2
    CHECK(json::parse(a.out)["P"][0][0].get<double>() == doctest::Approx(0.5));
  }
}

TEST_CASE("run") {
  const auto dir = scratch("run");
  SUBCASE("short horizon, deterministic outputs") {
    auto c = ScenarioConfig::reconnaissance();
    c.t_max = 0.01;
    const auto p = write_json(dir, "short.json", config_to_json(c));
    const auto r1 = invoke({"run", "--json", "--config", p.string(), "--out", (dir / "a").string()});
    const auto r2 = invoke({"run", "--json", "--config", p.string(), "--out", (dir / "b").string()});
    REQUIRE(r1.code == cli::kSuccess);
    const json s = json::parse(r1.out);
    CHECK(s["arrived"] == false);
    for (const char* f : {"metrics.csv", "vehicles.csv", "switches.csv", "lambda_hat.csv"}) {
      CHECK(fs::exists(dir / "a" / f));
      CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    }
    CHECK(json::parse(slurp(dir / "a" / "summary.json")) == s);
  }
  SUBCASE("default directed scenario arrives in the window") {
    const auto r = invoke({"run", "--json", "--config", (kConfigs / "directed.json").string(),
                           "--out", (dir / "full").string()});
    REQUIRE(r.code == cli::kSuccess);
    const double tau = json::parse(r.out)["tau_f"].get<double>();
    CHECK(tau >= 46.0);
    CHECK(tau <= 50.0);
  }
  SUBCASE("forced NaN") {
    auto c = ScenarioConfig::reconnaissance();
    c.tracking.kp = 1e308;
    c.t_max = 1.0;
    const auto p = write_json(dir, "nan.json", config_to_json(c));
    const auto r = invoke({"run", "--config", p.string(), "--out", (dir / "nan").string()});
    CHECK(r.code == cli::kNumericFailure);
    CHECK(r.err.find("non-finite") != std::string::npos);
  }
  SUBCASE("feasibility violation") {
    auto c = ScenarioConfig::reconnaissance();
    c.feasibility.gamma_ddot_max = 0.01;
    c.mission.gamma_ddot_d_max = 0.05;
    c.t_max = 1.0;
    const auto p = write_json(dir, "feas.json", config_to_json(c));
    const auto r = invoke({"run", "--config", p.string(), "--out", (dir / "feas").string()});
    CHECK(r.code == cli::kValidationFailure);
    CHECK(r.err.find("feasibility violation") != std::string::npos);
  }
  SUBCASE("usage errors") {
    CHECK(invoke({}).code == cli::kValidationFailure);
    CHECK(invoke({"run", "--config", (kConfigs / "directed.json").string()}).code ==
          cli::kValidationFailure);
    CHECK(invoke({"--help"}).code == cli::kSuccess);
  }
}

TEST_CASE("compare") {
  const auto dir = scratch("compare");
  SUBCASE("self comparison gives equal amounts") {
    auto c = ScenarioConfig::reconnaissance();
    c.t_max = 2.0;
    const auto p = write_json(dir, "d.json", config_to_json(c));
    const auto r = invoke({"compare", "--json", "--config", p.string(), "--baseline", p.string(),
                           "--out", (dir / "self").string()});
    REQUIRE(r.code == cli::kSuccess);
    const json doc = json::parse(r.out);
    CHECK(doc["comm_ratio"].get<double>() == 1.0);
    CHECK(doc["directed"] == doc["bidirectional"]);
    CHECK(json::parse(slurp(dir / "self" / "comparison.json")) == doc);
  }
  SUBCASE("default pair") {
    const auto r = invoke({"compare", "--config", (kConfigs / "directed.json").string(),
                           "--baseline", (kConfigs / "bidirectional.json").string(), "--out",
                           (dir / "pair").string()});
    REQUIRE(r.code == cli::kSuccess);
    CHECK(r.out.find("communication ratio") != std::string::npos);
    const json doc = json::parse(slurp(dir / "pair" / "comparison.json"));
    CHECK(doc["directed"]["comm_amount"].get<double>() <
          doc["bidirectional"]["comm_amount"].get<double>());
    CHECK(fs::exists(dir / "pair" / "directed" / "metrics.csv"));
    CHECK(fs::exists(dir / "pair" / "bidirectional" / "metrics.csv"));
  }
}
