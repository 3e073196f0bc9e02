#include "liestab/sim.hpp"

#include <algorithm>
#include <cmath>

namespace liestab {

std::vector<double> Partition::instants(double horizon) const {
  if (!(horizon > 0.0)) throw PreconditionError("horizon must be positive");
  std::vector<double> out;
  switch (rule) {
    case Rule::Uniform: {
      if (!(dt > 0.0)) throw PreconditionError("partition dt must be positive");
      for (std::size_t i = 0; static_cast<double>(i) * dt < horizon; ++i)
        out.push_back(static_cast<double>(i) * dt);
      break;
    }
    case Rule::Random: {
      if (!(lo > 0.0) || hi < lo) throw PreconditionError("bad random partition bounds");
      Rng rng(seed);
      double t = 0.0;
      while (t < horizon) {
        out.push_back(t);
        t += rng.uniform(lo, hi);
      }
      break;
    }
    case Rule::Explicit: {
      if (times.empty() || times.front() != 0.0)
        throw PreconditionError("explicit partition must start at 0");
      double prev = -1.0;
      for (double t : times) {
        if (t <= prev) throw PreconditionError("explicit partition must be strictly increasing");
        prev = t;
        if (t < horizon) out.push_back(t);
      }
      break;
    }
  }
  out.push_back(horizon);
  return out;
}

std::string termination_name(Termination t) {
  switch (t) {
    case Termination::Horizon: return "horizon";
    case Termination::Converged: return "converged";
    case Termination::Diverged: return "diverged";
    case Termination::Error: return "error";
  }
  return "?";
}

SampledTrajectory run_closed_loop(const Classifier& classifier, std::span<const double> x0,
                                  const Partition& partition, const SynthParams& synth_params,
                                  const ClosedLoopOptions& opts) {
  const System& sys = classifier.system();
  if (static_cast<int>(x0.size()) != sys.dim())
    throw DimensionError("x0 dimension does not match system");
  if (norm2(x0) > opts.R)
    throw PreconditionError("x0 outside the operating ball B[0," + std::to_string(opts.R) + "]");

  SampledTrajectory out;
  std::vector<double> x(x0.begin(), x0.end());
  out.dense.push_back({0.0, x, 0.0});
  auto instants = partition.instants(opts.horizon);
  double divergence_bound = opts.R * opts.divergence_factor;

  for (std::size_t i = 0; i < instants.size(); ++i) {
    double ti = instants[i];
    SampleRecord rec;
    rec.t = ti;
    rec.x = x;
    rec.v = sys.v_at(x);
    out.final_time = ti;
    double r = norm2(x);
    if (r <= opts.convergence_radius) {
      out.samples.push_back(std::move(rec));
      out.reason = Termination::Converged;
      return out;
    }
    if (r >= divergence_bound) {
      out.samples.push_back(std::move(rec));
      out.reason = Termination::Diverged;
      out.message = "|x| reached " + std::to_string(r);
      return out;
    }
    if (i + 1 == instants.size()) {
      out.samples.push_back(std::move(rec));
      out.reason = Termination::Horizon;
      return out;
    }
    double interval = instants[i + 1] - ti;
    SynthParams sp = synth_params;
    sp.pad_to = interval;
    SynthOutcome res = synthesize(classifier, x, interval, sp);
    rec.trials = static_cast<int>(res.trace.size());
    if (!res.ok()) {
      out.samples.push_back(std::move(rec));
      out.reason = Termination::Error;
      out.message = "witness search failed at t=" + std::to_string(ti) + ": " + res.failure;
      return out;
    }
    const DecreaseWitness& w = *res.witness;
    rec.tag = tag_name(w.classification.tag);
    rec.witness_order = w.classification.witness_order;
    ControlSchedule applied = w.schedule;
    double active = applied.total_duration();
    if (interval - active > 1e-15) applied.segments.push_back({interval - active, 0.0});
    rec.applied = applied;
    out.samples.push_back(std::move(rec));

    Trajectory leg = integrate_schedule(sys, x, applied, opts.ode);
    for (std::size_t p = 1; p < leg.points.size(); ++p) {
      TrajPoint tp = leg.points[p];
      tp.t += ti;
      out.dense.push_back(std::move(tp));
    }
    x = leg.back().x;
  }
  return out;  // unreachable: the final instant returns above
}

StabilityReport stability_sweep(const Classifier& classifier, std::span<const double> radii,
                                const Partition& partition, int runs_per_radius,
                                std::uint64_t seed, const SynthParams& synth_params,
                                const ClosedLoopOptions& opts) {
  if (runs_per_radius < 1) throw PreconditionError("runs_per_radius must be >= 1");
  const int n = classifier.system().dim();
  StabilityReport report;
  report.seed = seed;
  report.runs_per_radius = runs_per_radius;
  report.bands.resize(radii.size());

  std::vector<std::vector<double>> starts;
  for (std::size_t b = 0; b < radii.size(); ++b) {
    double delta = radii[b];
    if (delta > opts.R)
      throw PreconditionError("sweep radius exceeds the operating ball R");
    report.bands[b].delta = delta;
    report.bands[b].runs.resize(static_cast<std::size_t>(runs_per_radius));
    for (int r = 0; r < runs_per_radius; ++r) {
      std::vector<double> x0(static_cast<std::size_t>(n), 0.0);
      if (delta > 0.0) {
        Rng rng(Rng::mix(seed, b + 1, static_cast<std::uint64_t>(r) + 1));
        x0 = rng.on_sphere(n, delta);
      }
      starts.push_back(std::move(x0));
    }
  }
  std::vector<RunSummary> results(starts.size());
  parallel_for(starts.size(), [&](std::size_t j) {
    RunSummary& s = results[j];
    s.x0 = starts[j];
    SampledTrajectory traj = run_closed_loop(classifier, s.x0, partition, synth_params, opts);
    double peak = 0.0;
    for (const auto& p : traj.dense) peak = std::max(peak, norm2(p.x));
    s.peak = peak;
    s.reason = traj.reason;
    s.converged = traj.reason == Termination::Converged;
    s.final_time = traj.final_time;
  });
  for (std::size_t j = 0; j < starts.size(); ++j) {
    std::size_t b = j / static_cast<std::size_t>(runs_per_radius);
    std::size_t r = j % static_cast<std::size_t>(runs_per_radius);
    report.bands[b].runs[r] = results[j];
  }
  for (auto& band : report.bands) {
    band.sup_peak = 0.0;
    for (const auto& run : band.runs) band.sup_peak = std::max(band.sup_peak, run.peak);
  }
  return report;
}

}  // namespace liestab
