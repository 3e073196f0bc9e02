#pragma once

#include <optional>

#include "liestab/classify.hpp"
#include "liestab/ode.hpp"

namespace liestab {

/// A finite-duration open-loop control certified to decrease V: the endpoint
/// value drops below V(x0) while V never exceeds 2 V(x0) along the way.
struct DecreaseWitness {
  ControlSchedule schedule;
  double v_start = 0.0;
  double v_end = 0.0;
  double v_max_along = 0.0;
  Classification classification;
  // Two-phase shape parameters (zero for single-segment witnesses): the
  // schedule is u = -rho*u1 on [0,t] followed by u = u1 on (t, t+rho*t].
  double u1 = 0.0;
  double rho = 0.0;
  double phase_time = 0.0;
};

struct CandidateTrial {
  double u1 = 0.0, rho = 0.0, t = 0.0;
  double v_delta = 0.0;  // V(end) - V(start) of the active schedule
  double v_max = 0.0;
  bool accepted = false;
};

struct SynthOutcome {
  std::optional<DecreaseWitness> witness;
  std::vector<CandidateTrial> trace;
  std::string failure;

  bool ok() const { return witness.has_value(); }
};

/// Search grids for the witness search. Candidates are tried in a fixed
/// deterministic order; the first verified candidate wins. Predicted bracket
/// signs only order the search — acceptance is always by simulated decrease.
struct SynthParams {
  std::vector<double> u_magnitudes;       // log-spaced 1e-2..1e1 by default
  std::vector<double> rho_values{0.5, 1.0, 2.0, 4.0};
  double t_start = 0.1;                   // cap on the first-phase duration
  int t_halvings = 14;                    // geometric duration levels
  double ode_tol = 1e-9;
  double verify_tol_factor = 0.01;        // accepted candidates are re-simulated tighter
  int max_trials = 4000;
  double pad_to = 0.0;  // > 0: additionally require decrease after zero-input
                        // padding out to this horizon (sampled-data intervals)
  bool leading_order_check = true;  // also require the half-duration schedule
                                    // to decrease; valid on exact stratum
                                    // points where m^(1..N)(0) = 0
  bool best_over_shapes = false;    // keep searching across (rho, duration)
                                    // shapes and return the deepest verified
                                    // decrease instead of the first
  double progress_fraction = 1e-3;  // a mechanism is "making progress" when
                                    // its verified decrease reaches this
                                    // fraction of V(x0) (scaled by the cap)

  SynthParams();
};

/// Single-segment witness for points where gV(x0) != 0 (u = -k sign(gV)) or
/// where the drift itself decreases V (u = 0).
SynthOutcome synth_constant(const System& sys, std::span<const double> x0, double duration_cap,
                            const Classification& cls, const SynthParams& params);

/// Two-phase witness u = -rho*u1 for time t then u = u1 for time rho*t, for
/// points certified by one of the Nth-order bracket conditions.
SynthOutcome synth_two_phase(const System& sys, std::span<const double> x0,
                             const Classification& cls, double duration_cap,
                             const SynthParams& params);

/// Classifies x0 and routes to the matching witness search.
SynthOutcome synthesize(const Classifier& classifier, std::span<const double> x0,
                        double duration_cap, const SynthParams& params);

/// m(t) = V of the two-phase composed flow from x0: the field f - rho*u1*g
/// flowed for time t, then f + u1*g for time rho*t. Negative t flows both
/// fields backward, which the finite-difference checks around t = 0 rely on.
double m_value(const System& sys, std::span<const double> x0, double u1, double rho, double t,
               double tol = 1e-12);

/// m(t) sampled on a positive, strictly increasing grid.
std::vector<std::pair<double, double>> m_profile(const System& sys, std::span<const double> x0,
                                                 double u1, double rho,
                                                 std::span<const double> t_grid,
                                                 double tol = 1e-10);

}  // namespace liestab
