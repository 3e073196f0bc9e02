#include "liestab/io.hpp"

#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

namespace liestab {

using json = nlohmann::ordered_json;

json classification_json(const Classification& cls) {
  json j;
  j["tag"] = tag_name(cls.tag);
  j["N"] = cls.witness_order;
  json diag = json::object();
  for (const auto& [k, v] : cls.diagnostics) diag[k] = v;
  j["diagnostics"] = diag;
  return j;
}

json scan_report_json(const ScanReport& report) {
  json j;
  j["grid"] = {{"lo", report.grid.lo},
               {"hi", report.grid.hi},
               {"step", report.grid.step},
               {"exclude_radius", report.grid.exclude_radius}};
  j["counts"] = report.counts;
  j["n_points"] = report.points.size();
  j["unclassified"] = report.unclassified;
  j["errors"] = report.errors;
  json pts = json::array();
  for (const auto& p : report.points) {
    json e;
    e["x"] = p.x;
    if (p.error.empty()) {
      e["tag"] = tag_name(p.cls.tag);
      e["N"] = p.cls.witness_order;
      json diag = json::object();
      for (const auto& [k, v] : p.cls.diagnostics) diag[k] = v;
      e["diagnostics"] = diag;
    } else {
      e["error"] = p.error;
    }
    pts.push_back(std::move(e));
  }
  j["points"] = std::move(pts);
  return j;
}

namespace {

json schedule_json(const ControlSchedule& s) {
  json arr = json::array();
  for (const auto& seg : s.segments) arr.push_back({{"duration", seg.duration}, {"value", seg.value}});
  return arr;
}

}  // namespace

json synth_outcome_json(const SynthOutcome& outcome) {
  json j;
  j["found"] = outcome.ok();
  j["trace_length"] = outcome.trace.size();
  if (outcome.ok()) {
    const DecreaseWitness& w = *outcome.witness;
    j["schedule"] = schedule_json(w.schedule);
    j["total_duration"] = w.schedule.total_duration();
    j["v_start"] = w.v_start;
    j["v_end"] = w.v_end;
    j["v_max_along"] = w.v_max_along;
    j["u1"] = w.u1;
    j["rho"] = w.rho;
    j["phase_time"] = w.phase_time;
    j["classification"] = classification_json(w.classification);
  } else {
    j["failure"] = outcome.failure;
  }
  return j;
}

json sampled_trajectory_json(const System& sys, const SampledTrajectory& traj, bool include_dense) {
  json j;
  j["reason"] = termination_name(traj.reason);
  if (!traj.message.empty()) j["message"] = traj.message;
  j["final_time"] = traj.final_time;
  json samples = json::array();
  for (const auto& s : traj.samples) {
    json e;
    e["t"] = s.t;
    e["x"] = s.x;
    e["V"] = s.v;
    e["tag"] = s.tag;
    e["N"] = s.witness_order;
    e["trials"] = s.trials;
    e["schedule"] = schedule_json(s.applied);
    samples.push_back(std::move(e));
  }
  j["samples"] = std::move(samples);
  if (include_dense) {
    json dense = json::array();
    std::vector<double> stack;
    for (const auto& p : traj.dense)
      dense.push_back({{"t", p.t}, {"x", p.x}, {"u", p.u}, {"V", sys.v_at(p.x, stack)}});
    j["dense"] = std::move(dense);
  } else {
    j["dense_points"] = traj.dense.size();
  }
  return j;
}

json stability_report_json(const StabilityReport& report) {
  json j;
  j["seed"] = report.seed;
  j["runs_per_radius"] = report.runs_per_radius;
  json bands = json::array();
  for (const auto& b : report.bands) {
    json e;
    e["delta"] = b.delta;
    e["sup_peak"] = b.sup_peak;
    json runs = json::array();
    for (const auto& r : b.runs)
      runs.push_back({{"x0", r.x0},
                      {"peak", r.peak},
                      {"converged", r.converged},
                      {"final_time", r.final_time},
                      {"reason", termination_name(r.reason)}});
    e["runs"] = std::move(runs);
    bands.push_back(std::move(e));
  }
  j["bands"] = std::move(bands);
  return j;
}

void write_scan_csv(std::ostream& os, const ScanReport& report) {
  std::size_t dim = report.grid.lo.size();
  for (std::size_t d = 1; d <= dim; ++d) os << "x" << d << ",";
  os << "tag,N,gV,fV,certificate\n";
  for (const auto& p : report.points) {
    for (double c : p.x) os << json(c).dump() << ",";
    if (!p.error.empty()) {
      os << "error,0,,,\n";
      continue;
    }
    os << tag_name(p.cls.tag) << "," << p.cls.witness_order << ",";
    auto emit = [&](const char* key) {
      for (const auto& [k, v] : p.cls.diagnostics)
        if (k == key) {
          os << json(v).dump();
          return;
        }
    };
    emit("gV");
    os << ",";
    emit("fV");
    os << ",";
    for (const auto& [k, v] : p.cls.diagnostics)
      if (k.rfind("certificate", 0) == 0) os << json(v).dump();
    os << "\n";
  }
}

void write_trajectory_csv(std::ostream& os, const System& sys, const SampledTrajectory& traj) {
  os << "t,";
  for (int d = 1; d <= sys.dim(); ++d) os << "x" << d << ",";
  os << "u,V\n";
  std::vector<double> stack;
  for (const auto& p : traj.dense) {
    os << json(p.t).dump() << ",";
    for (double c : p.x) os << json(c).dump() << ",";
    os << json(p.u).dump() << "," << json(sys.v_at(p.x, stack)).dump() << "\n";
  }
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << contents;
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace liestab
