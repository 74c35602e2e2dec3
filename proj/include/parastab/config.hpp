#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "parastab/experiments.hpp"

namespace parastab {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Serializable run configuration; JSON on disk, flag overrides on the CLI.
/// Defaults come from the named scenario ("default" or "nonsmooth").
struct RunConfig {
  std::string scenario = "default";
  std::string preset = "smooth";
  int n_nodes = 2001;
  std::string bc = "neumann";
  double nu = 0.1;
  int actuator_count = 5;
  double support_ratio = 0.1;
  double lambda = 4.0;
  std::vector<double> k_values = {1000.0};
  double dt = 1e-4;
  double T = 4.0;
  int record_every = 10;
  std::vector<Window> feed_on = {{0.0, 4.0}};
  double contact_eps = 1e-3;
  std::string out_dir = "out";

  bool operator==(const RunConfig& other) const;
};

RunConfig config_from_scenario(const Scenario& s);

/// Parse a JSON document; unknown keys and out-of-range values raise
/// ConfigError. Keys that are absent keep the scenario's defaults.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config_file(const std::filesystem::path& path);
std::string serialize(const RunConfig& config);

/// Validated scenario; emits a stderr warning when a penalty value will
/// force a smaller step (the tightening itself happens per run).
Scenario to_scenario(const RunConfig& config);

struct RunManifest {
  RunConfig config;
  std::string version;
  std::string command;
  double wall_seconds = 0.0;
  std::vector<std::string> outputs;
  std::vector<double> dt_used;  // per k value
};

/// Atomic write (temp file + rename).
void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

}  // namespace parastab
