#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "coordsim/coordalg.hpp"
#include "coordsim/simharness.hpp"

namespace coordsim {

/// Missing keys fall back to the reconnaissance-scenario defaults.
ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ScenarioConfig& c);

/// Throws ConfigError; parse errors carry the byte offset.
ScenarioConfig load_config(const std::filesystem::path& path);

nlohmann::json digraph_to_json(const Digraph& d);
Digraph digraph_from_json(const nlohmann::json& j);

nlohmann::json certificate_to_json(const SwitchingCertificate& cert, double a, double b);

nlohmann::json summary_to_json(const ScenarioConfig& config, const RunResult& result);

// CSV writers; stride applies to the per-step files.
void write_metrics_csv(std::ostream& os, const MetricsLog& log, int stride);
void write_vehicles_csv(std::ostream& os, const MetricsLog& log, int stride);
void write_switches_csv(std::ostream& os, const MetricsLog& log);
void write_lambda_hat_csv(std::ostream& os, const MetricsLog& log);

/// metrics.csv, vehicles.csv, switches.csv, lambda_hat.csv and summary.json under `dir`.
void write_outputs(const std::filesystem::path& dir, const ScenarioConfig& config,
                   const RunResult& result);

}  // namespace coordsim
