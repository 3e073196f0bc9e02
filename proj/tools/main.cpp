// Command-line front end: verify | classify | synth | simulate | sweep.
// Exit codes: 0 success, 1 verification/classification/synthesis failure,
// 2 I/O error, 3 precondition violation.

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "liestab/config.hpp"
#include "liestab/verify.hpp"

namespace fs = std::filesystem;
using namespace liestab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitIo = 2;
constexpr int kExitPrecondition = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> formats;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Scenario file (JSON)")->required();
  cmd->add_option("--out", args.out_dir, "Output directory (overrides the config)");
  cmd->add_option("--format", args.formats, "Output formats: csv, json")->delimiter(',');
  auto* seed = cmd->add_option("--seed", args.seed, "Seed override for randomized runs");
  seed->each([&args](const std::string&) { args.seed_set = true; });
}

ScenarioConfig load_with_overrides(const CommonArgs& args) {
  ScenarioConfig cfg = load_scenario(args.config_path);
  if (!args.out_dir.empty()) cfg.output.dir = args.out_dir;
  if (!args.formats.empty()) cfg.output.formats = args.formats;
  if (args.seed_set) cfg.simulation.seed = args.seed;
  return cfg;
}

bool wants(const ScenarioConfig& cfg, const std::string& format) {
  for (const auto& f : cfg.output.formats)
    if (f == format) return true;
  return false;
}

fs::path ensure_out_dir(const ScenarioConfig& cfg) {
  fs::path dir(cfg.output.dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

int cmd_verify(const CommonArgs& args, bool flip_sign, int n_points) {
  ScenarioConfig cfg = load_with_overrides(args);
  if (cfg.system.template_name != "chain_power")
    throw PreconditionError("verify runs against the chain_power template");
  BracketConvention conv = flip_sign ? BracketConvention::Flipped : BracketConvention::Standard;
  std::uint64_t seed = args.seed_set ? args.seed : cfg.simulation.seed;
  RegressionReport report =
      bracket_regression(cfg.system.L, cfg.system.a, cfg.system.b, n_points, seed, 1e-8, conv);
  bool ok = report.all_pass();
  for (const auto& chk : report.checks)
    std::cout << (chk.pass ? "PASS" : "FAIL") << "  " << chk.name << "  max|diff| = " << chk.max_diff
              << " (tol " << chk.tolerance << ")\n";
  std::cout << (ok ? "verify: all identities match\n" : "verify: MISMATCH\n");
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_classify(const CommonArgs& args) {
  ScenarioConfig cfg = load_with_overrides(args);
  System sys = build_system(cfg.system);
  validate_system(sys);
  Classifier classifier(std::move(sys));
  ScanReport report = classifier.scan_region(cfg.classifier.grid);
  fs::path dir = ensure_out_dir(cfg);
  if (wants(cfg, "json"))
    write_text_file((dir / "scan.json").string(), scan_report_json(report).dump(2) + "\n");
  if (wants(cfg, "csv")) {
    std::ostringstream csv;
    write_scan_csv(csv, report);
    write_text_file((dir / "scan.csv").string(), csv.str());
  }
  std::cout << "classified " << report.points.size() << " grid points:";
  for (const auto& [tag, count] : report.counts) std::cout << " " << tag << "=" << count;
  std::cout << "\n";
  bool clean = report.unclassified.empty() && report.errors.empty();
  if (!clean)
    std::cout << "unclassified points: " << report.unclassified.size()
              << ", errors: " << report.errors.size() << "\n";
  return clean ? kExitOk : kExitCheckFailed;
}

int cmd_synth(const CommonArgs& args) {
  ScenarioConfig cfg = load_with_overrides(args);
  System sys = build_system(cfg.system);
  validate_system(sys);
  Classifier classifier(std::move(sys));
  SynthOutcome outcome =
      synthesize(classifier, cfg.synth.x0, cfg.synth.duration_cap, cfg.synth.params);
  fs::path dir = ensure_out_dir(cfg);
  write_text_file((dir / "witness.json").string(), synth_outcome_json(outcome).dump(2) + "\n");
  if (outcome.ok()) {
    const DecreaseWitness& w = *outcome.witness;
    std::cout << "witness found: " << tag_name(w.classification.tag)
              << " N=" << w.classification.witness_order << ", duration "
              << w.schedule.total_duration() << ", V " << w.v_start << " -> " << w.v_end << "\n";
    return kExitOk;
  }
  std::cout << "witness search failed: " << outcome.failure << " (" << outcome.trace.size()
            << " trials)\n";
  return kExitCheckFailed;
}

int cmd_simulate(const CommonArgs& args) {
  ScenarioConfig cfg = load_with_overrides(args);
  System sys = build_system(cfg.system);
  validate_system(sys);
  Classifier classifier(std::move(sys));
  Partition partition = build_partition(cfg.simulation);
  ClosedLoopOptions opts = build_loop_options(cfg.simulation);
  SampledTrajectory traj = run_closed_loop(classifier, cfg.simulation.x0, partition,
                                           cfg.synth.params, opts);
  fs::path dir = ensure_out_dir(cfg);
  if (wants(cfg, "json"))
    write_text_file((dir / "trajectory.json").string(),
                    sampled_trajectory_json(classifier.system(), traj).dump(2) + "\n");
  if (wants(cfg, "csv")) {
    std::ostringstream csv;
    write_trajectory_csv(csv, classifier.system(), traj);
    write_text_file((dir / "trajectory.csv").string(), csv.str());
  }
  std::cout << "run: " << termination_name(traj.reason) << " at t=" << traj.final_time << ", "
            << traj.samples.size() << " samples, final |x|=" << norm2(traj.samples.back().x)
            << ", V " << traj.samples.front().v << " -> " << traj.samples.back().v << "\n";
  if (traj.reason == Termination::Error) {
    std::cout << traj.message << "\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

int cmd_sweep(const CommonArgs& args) {
  ScenarioConfig cfg = load_with_overrides(args);
  System sys = build_system(cfg.system);
  validate_system(sys);
  Classifier classifier(std::move(sys));
  Partition partition = build_partition(cfg.simulation);
  ClosedLoopOptions opts = build_loop_options(cfg.simulation);
  StabilityReport report =
      stability_sweep(classifier, cfg.simulation.radii, partition, cfg.simulation.runs_per_radius,
                      cfg.simulation.seed, cfg.synth.params, opts);
  fs::path dir = ensure_out_dir(cfg);
  write_text_file((dir / "stability.json").string(), stability_report_json(report).dump(2) + "\n");
  std::cout << "sweep:";
  for (const auto& band : report.bands)
    std::cout << "  delta=" << band.delta << " sup_peak=" << band.sup_peak;
  std::cout << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lie-bracket stabilizability toolkit: classify states of affine single-input "
               "systems, synthesize Lyapunov-decrease controls, and simulate sampled-data loops"};
  app.require_subcommand(1);

  CommonArgs verify_args, classify_args, synth_args, sim_args, sweep_args;
  bool flip_sign = false;
  int n_points = 100;

  auto* verify = app.add_subcommand("verify", "Check the symbolic bracket engine against closed forms");
  add_common(verify, verify_args);
  verify->add_flag("--flip-bracket-sign", flip_sign,
                   "Negate the bracket convention (verification hook; must fail)");
  verify->add_option("--points", n_points, "Random evaluation points per identity");

  auto* classify = app.add_subcommand("classify", "Scan a state grid and classify every point");
  add_common(classify, classify_args);

  auto* synth = app.add_subcommand("synth", "Search a decrease witness for one state");
  add_common(synth, synth_args);

  auto* simulate = app.add_subcommand("simulate", "Run one sampled-data closed loop");
  add_common(simulate, sim_args);

  auto* sweep = app.add_subcommand("sweep", "Stability sweep over initial-condition radii");
  add_common(sweep, sweep_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) return cmd_verify(verify_args, flip_sign, n_points);
    if (classify->parsed()) return cmd_classify(classify_args);
    if (synth->parsed()) return cmd_synth(synth_args);
    if (simulate->parsed()) return cmd_simulate(sim_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const ParseError& e) {
    std::cerr << "expression error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}
