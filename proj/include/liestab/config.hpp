#pragma once

#include <string>

#include "liestab/io.hpp"

namespace liestab {

/// Scenario file: one JSON document with expression-valued fields. See
/// docs/config.md for the field-by-field reference.
struct SystemConfig {
  std::string template_name = "chain_power";  // or "custom"
  int L = 3;
  std::string a = "1";
  std::string b = "1";
  int n = 3;                       // custom template
  std::vector<std::string> f, g;   // custom template
  std::string V;                   // custom template
  double eps_scale = 1e-9;
  int n_max = 7;
};

struct ClassifierConfig {
  GridSpec grid{{-1, -1, -1}, {1, 1, 1}, 0.25, 1e-6};
};

struct SynthConfig {
  SynthParams params;
  std::vector<double> x0{1.0, 1.0, 0.0};
  double duration_cap = 0.25;
};

struct SimulationConfig {
  std::vector<double> x0{0.5, 0.5, 0.5};
  std::string partition_rule = "uniform";  // uniform | random | explicit
  double dt = 0.25;
  double lo = 0.05, hi = 0.5;
  std::vector<double> times;
  std::uint64_t seed = 1;
  double R = 2.0;
  double horizon = 200.0;
  double convergence_radius = 1e-2;
  double divergence_factor = 1e3;
  double ode_tol = 1e-9;
  std::vector<double> radii{0.05, 0.1, 0.2, 0.5, 1.0};
  int runs_per_radius = 20;
};

struct OutputConfig {
  std::string dir = "out";
  std::vector<std::string> formats{"csv", "json"};
};

struct ScenarioConfig {
  SystemConfig system;
  ClassifierConfig classifier;
  SynthConfig synth;
  SimulationConfig simulation;
  OutputConfig output;
};

/// Parses and validates a scenario. I/O problems raise IoError; malformed
/// content (bad JSON, unparsable expressions, even L, ...) raises
/// PreconditionError.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig scenario_from_json_text(const std::string& text);

/// Canonical re-emission (defaults filled in); emit(parse(emit(x))) is
/// byte-identical to emit(x).
std::string scenario_to_json_text(const ScenarioConfig& config);

System build_system(const SystemConfig& config);
Partition build_partition(const SimulationConfig& config);
ClosedLoopOptions build_loop_options(const SimulationConfig& config);

}  // namespace liestab
