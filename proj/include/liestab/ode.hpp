#pragma once

#include <vector>

#include "liestab/system.hpp"

namespace liestab {

class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double t_fail) : Error(what), t_fail(t_fail) {}
  double t_fail;
};

/// One hold interval of a piecewise-constant input.
struct ControlSegment {
  double duration = 0.0;  // > 0
  double value = 0.0;
};

struct ControlSchedule {
  std::vector<ControlSegment> segments;

  double total_duration() const {
    double s = 0.0;
    for (const auto& seg : segments) s += seg.duration;
    return s;
  }
};

struct IntegratorOptions {
  double tol = 1e-9;       // local error per step (absolute and relative)
  double fixed_step = 0.0; // > 0 disables adaptivity; used by order checks
  std::size_t max_steps = 10'000'000;
};

struct TrajPoint {
  double t = 0.0;
  std::vector<double> x;
  double u = 0.0;
};

struct Trajectory {
  std::vector<TrajPoint> points;

  const TrajPoint& back() const { return points.back(); }
  double peak_norm() const;
};

/// Integrates dx/dt = f(x) + u g(x) for |duration| from x (in place) with the
/// embedded Dormand-Prince 5(4) pair. Steps never straddle the end of the
/// span; a negative duration integrates the time-reversed field (flowing
/// backward). Dense output, when requested, records every accepted step plus
/// the exact endpoint at t_offset + |duration|.
void flow_affine(const System& sys, std::vector<double>& x, double u, double duration,
                 const IntegratorOptions& opts, Trajectory* dense = nullptr,
                 double t_offset = 0.0);

/// Integrates a full piecewise-constant schedule from x0, returning the dense
/// trajectory. Segment boundaries are hit exactly and always recorded.
Trajectory integrate_schedule(const System& sys, std::span<const double> x0,
                              const ControlSchedule& schedule, const IntegratorOptions& opts);

/// Max of V along a trajectory (dense points).
double max_v_along(const System& sys, const Trajectory& traj);

}  // namespace liestab
