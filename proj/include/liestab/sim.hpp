#pragma once

#include "liestab/synth.hpp"

namespace liestab {

/// Sample-instant generator: T1 = 0 < T2 < T3 < ... The closed loop holds
/// each computed schedule over [T_i, T_{i+1}).
struct Partition {
  enum class Rule { Uniform, Random, Explicit };
  Rule rule = Rule::Uniform;
  double dt = 0.25;              // Uniform
  double lo = 0.05, hi = 0.5;    // Random increment bounds
  std::uint64_t seed = 1;        // Random
  std::vector<double> times;     // Explicit (must start at 0)

  /// Instants tiling [0, horizon]: starts at 0, ends exactly at horizon.
  std::vector<double> instants(double horizon) const;
};

enum class Termination { Horizon, Converged, Diverged, Error };

std::string termination_name(Termination t);

struct SampleRecord {
  double t = 0.0;
  std::vector<double> x;
  double v = 0.0;
  ControlSchedule applied;  // includes any zero-input padding
  std::string tag;
  int witness_order = 0;
  int trials = 0;
};

struct SampledTrajectory {
  std::vector<TrajPoint> dense;
  std::vector<SampleRecord> samples;
  Termination reason = Termination::Horizon;
  std::string message;
  double final_time = 0.0;
};

struct ClosedLoopOptions {
  double R = 2.0;                    // operating ball: x0 must satisfy |x0| <= R
  double convergence_radius = 1e-2;
  double divergence_factor = 1e3;    // diverged when |x| >= R * factor
  double horizon = 200.0;
  IntegratorOptions ode{1e-9, 0.0, 10'000'000};
};

/// Runs the sampled-data closed loop: at every sample instant with
/// |x| > convergence_radius, a decrease witness is synthesized with the
/// interval length as its duration cap and applied (zero-padded when
/// shorter). Terminates on the horizon, on convergence, on divergence, or on
/// a synthesizer failure (recorded, not thrown).
SampledTrajectory run_closed_loop(const Classifier& classifier, std::span<const double> x0,
                                  const Partition& partition, const SynthParams& synth_params,
                                  const ClosedLoopOptions& opts);

struct RunSummary {
  std::vector<double> x0;
  double peak = 0.0;
  bool converged = false;
  double final_time = 0.0;
  Termination reason = Termination::Horizon;
};

struct RadiusBand {
  double delta = 0.0;
  double sup_peak = 0.0;
  std::vector<RunSummary> runs;
};

struct StabilityReport {
  std::uint64_t seed = 0;
  int runs_per_radius = 0;
  std::vector<RadiusBand> bands;
};

/// For each radius delta, runs closed loops from random |x0| = delta and
/// records the per-run peak |x(t)| plus the empirical delta -> sup-peak map.
/// Identical seeds and options reproduce the report bit-identically.
StabilityReport stability_sweep(const Classifier& classifier, std::span<const double> radii,
                                const Partition& partition, int runs_per_radius,
                                std::uint64_t seed, const SynthParams& synth_params,
                                const ClosedLoopOptions& opts);

}  // namespace liestab
