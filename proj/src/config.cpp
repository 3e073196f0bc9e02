#include "liestab/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace liestab {

using json = nlohmann::ordered_json;

namespace {

template <typename T>
void read_into(const json& j, const char* key, T& out) {
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception& e) {
      throw PreconditionError("config field '" + std::string(key) + "': " + e.what());
    }
  }
}

ScenarioConfig parse_config(const json& j) {
  ScenarioConfig c;
  if (j.contains("system")) {
    const json& s = j.at("system");
    read_into(s, "template", c.system.template_name);
    read_into(s, "L", c.system.L);
    read_into(s, "a", c.system.a);
    read_into(s, "b", c.system.b);
    read_into(s, "n", c.system.n);
    read_into(s, "f", c.system.f);
    read_into(s, "g", c.system.g);
    read_into(s, "V", c.system.V);
    read_into(s, "eps_scale", c.system.eps_scale);
    read_into(s, "n_max", c.system.n_max);
  }
  if (j.contains("classifier")) {
    const json& s = j.at("classifier");
    if (s.contains("grid")) {
      const json& g = s.at("grid");
      read_into(g, "lo", c.classifier.grid.lo);
      read_into(g, "hi", c.classifier.grid.hi);
      read_into(g, "step", c.classifier.grid.step);
      read_into(g, "exclude_radius", c.classifier.grid.exclude_radius);
    }
  }
  if (j.contains("synth")) {
    const json& s = j.at("synth");
    read_into(s, "u_magnitudes", c.synth.params.u_magnitudes);
    read_into(s, "rho_values", c.synth.params.rho_values);
    read_into(s, "t_start", c.synth.params.t_start);
    read_into(s, "t_halvings", c.synth.params.t_halvings);
    read_into(s, "ode_tol", c.synth.params.ode_tol);
    read_into(s, "verify_tol_factor", c.synth.params.verify_tol_factor);
    read_into(s, "max_trials", c.synth.params.max_trials);
    read_into(s, "x0", c.synth.x0);
    read_into(s, "duration_cap", c.synth.duration_cap);
  }
  if (j.contains("simulation")) {
    const json& s = j.at("simulation");
    read_into(s, "x0", c.simulation.x0);
    if (s.contains("partition")) {
      const json& p = s.at("partition");
      read_into(p, "rule", c.simulation.partition_rule);
      read_into(p, "dt", c.simulation.dt);
      read_into(p, "lo", c.simulation.lo);
      read_into(p, "hi", c.simulation.hi);
      read_into(p, "times", c.simulation.times);
    }
    read_into(s, "seed", c.simulation.seed);
    read_into(s, "R", c.simulation.R);
    read_into(s, "horizon", c.simulation.horizon);
    read_into(s, "convergence_radius", c.simulation.convergence_radius);
    read_into(s, "divergence_factor", c.simulation.divergence_factor);
    read_into(s, "ode_tol", c.simulation.ode_tol);
    read_into(s, "radii", c.simulation.radii);
    read_into(s, "runs_per_radius", c.simulation.runs_per_radius);
  }
  if (j.contains("output")) {
    const json& s = j.at("output");
    read_into(s, "dir", c.output.dir);
    read_into(s, "formats", c.output.formats);
  }
  return c;
}

void validate(const ScenarioConfig& c) {
  build_system(c.system);  // throws on bad template parameters / expressions
  if (c.system.template_name == "chain_power" || c.system.template_name == "custom") {
    // ok
  } else {
    throw PreconditionError("unknown system template '" + c.system.template_name + "'");
  }
  for (const auto& fmt : c.output.formats)
    if (fmt != "csv" && fmt != "json")
      throw PreconditionError("unknown output format '" + fmt + "'");
  if (c.simulation.partition_rule != "uniform" && c.simulation.partition_rule != "random" &&
      c.simulation.partition_rule != "explicit")
    throw PreconditionError("unknown partition rule '" + c.simulation.partition_rule + "'");
}

}  // namespace

ScenarioConfig scenario_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("config is not valid JSON: ") + e.what());
  }
  ScenarioConfig c = parse_config(j);
  validate(c);
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return scenario_from_json_text(ss.str());
}

std::string scenario_to_json_text(const ScenarioConfig& c) {
  json j;
  json sys;
  sys["template"] = c.system.template_name;
  if (c.system.template_name == "custom") {
    sys["n"] = c.system.n;
    sys["f"] = c.system.f;
    sys["g"] = c.system.g;
    sys["V"] = c.system.V;
  } else {
    sys["L"] = c.system.L;
    sys["a"] = c.system.a;
    sys["b"] = c.system.b;
  }
  sys["eps_scale"] = c.system.eps_scale;
  sys["n_max"] = c.system.n_max;
  j["system"] = sys;
  j["classifier"] = {{"grid",
                      {{"lo", c.classifier.grid.lo},
                       {"hi", c.classifier.grid.hi},
                       {"step", c.classifier.grid.step},
                       {"exclude_radius", c.classifier.grid.exclude_radius}}}};
  j["synth"] = {{"u_magnitudes", c.synth.params.u_magnitudes},
                {"rho_values", c.synth.params.rho_values},
                {"t_start", c.synth.params.t_start},
                {"t_halvings", c.synth.params.t_halvings},
                {"ode_tol", c.synth.params.ode_tol},
                {"verify_tol_factor", c.synth.params.verify_tol_factor},
                {"max_trials", c.synth.params.max_trials},
                {"x0", c.synth.x0},
                {"duration_cap", c.synth.duration_cap}};
  json part;
  part["rule"] = c.simulation.partition_rule;
  if (c.simulation.partition_rule == "uniform") part["dt"] = c.simulation.dt;
  if (c.simulation.partition_rule == "random") {
    part["lo"] = c.simulation.lo;
    part["hi"] = c.simulation.hi;
  }
  if (c.simulation.partition_rule == "explicit") part["times"] = c.simulation.times;
  j["simulation"] = {{"x0", c.simulation.x0},
                     {"partition", part},
                     {"seed", c.simulation.seed},
                     {"R", c.simulation.R},
                     {"horizon", c.simulation.horizon},
                     {"convergence_radius", c.simulation.convergence_radius},
                     {"divergence_factor", c.simulation.divergence_factor},
                     {"ode_tol", c.simulation.ode_tol},
                     {"radii", c.simulation.radii},
                     {"runs_per_radius", c.simulation.runs_per_radius}};
  j["output"] = {{"dir", c.output.dir}, {"formats", c.output.formats}};
  return j.dump(2) + "\n";
}

System build_system(const SystemConfig& c) {
  if (c.template_name == "chain_power")
    return chain_power_system(c.L, c.a, c.b, c.eps_scale, c.n_max);
  if (c.template_name == "custom") {
    if (c.n < 1) throw PreconditionError("custom system needs n >= 1");
    if (c.V.empty()) throw PreconditionError("custom system needs V");
    VectorField f = make_vector_field(c.n, c.f);
    VectorField g = make_vector_field(c.n, c.g);
    ScalarField V = parse(c.V, c.n);
    return System::make(std::move(f), std::move(g), std::move(V), c.eps_scale, c.n_max);
  }
  throw PreconditionError("unknown system template '" + c.template_name + "'");
}

Partition build_partition(const SimulationConfig& c) {
  Partition p;
  if (c.partition_rule == "uniform") {
    p.rule = Partition::Rule::Uniform;
    p.dt = c.dt;
  } else if (c.partition_rule == "random") {
    p.rule = Partition::Rule::Random;
    p.lo = c.lo;
    p.hi = c.hi;
    p.seed = c.seed;
  } else {
    p.rule = Partition::Rule::Explicit;
    p.times = c.times;
  }
  return p;
}

ClosedLoopOptions build_loop_options(const SimulationConfig& c) {
  ClosedLoopOptions o;
  o.R = c.R;
  o.convergence_radius = c.convergence_radius;
  o.divergence_factor = c.divergence_factor;
  o.horizon = c.horizon;
  o.ode.tol = c.ode_tol;
  return o;
}

}  // namespace liestab
