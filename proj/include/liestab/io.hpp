#pragma once

#include <iosfwd>
#include <string>

#include "liestab/sim.hpp"

#include <nlohmann/json_fwd.hpp>

namespace liestab {

class IoError : public Error {
 public:
  using Error::Error;
};

nlohmann::ordered_json classification_json(const Classification& cls);
nlohmann::ordered_json scan_report_json(const ScanReport& report);
nlohmann::ordered_json synth_outcome_json(const SynthOutcome& outcome);
nlohmann::ordered_json sampled_trajectory_json(const System& sys, const SampledTrajectory& traj,
                                               bool include_dense = true);
nlohmann::ordered_json stability_report_json(const StabilityReport& report);

/// One row per grid point: coordinates, tag, N, then the leading diagnostics.
void write_scan_csv(std::ostream& os, const ScanReport& report);

/// One row per dense integration point: t, x1..xn, u, V.
void write_trajectory_csv(std::ostream& os, const System& sys, const SampledTrajectory& traj);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace liestab
