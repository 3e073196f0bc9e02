#include "liestab/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace liestab {

double Trajectory::peak_norm() const {
  double m = 0.0;
  for (const auto& p : points) m = std::max(m, norm2(p.x));
  return m;
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                 kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192, kB5 = -2187.0 / 6784,
                 kB6 = 11.0 / 84;
// (5th-order weights) - (4th-order weights), for the error estimate.
constexpr double kE1 = kB1 - 5179.0 / 57600, kE3 = kB3 - 7571.0 / 16695, kE4 = kB4 - 393.0 / 640,
                 kE5 = kB5 - -92097.0 / 339200, kE6 = kB6 - 187.0 / 2100, kE7 = -1.0 / 40;

class AffineStepper {
 public:
  AffineStepper(const System& sys, double u, bool reverse)
      : sys_(sys), u_(u), sign_(reverse ? -1.0 : 1.0), n_(static_cast<std::size_t>(sys.dim())) {
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &err_})
      v->assign(n_, 0.0);
    ft_.assign(n_, 0.0);
    gt_.assign(n_, 0.0);
  }

  void rhs(std::span<const double> x, std::vector<double>& out) {
    sys_.cf().eval(x, ft_, stack_);
    sys_.cg().eval(x, gt_, stack_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = sign_ * (ft_[i] + u_ * gt_[i]);
  }

  // One trial step of size h from x; fills xnew and returns the scaled error norm.
  double step(const std::vector<double>& x, double h, std::vector<double>& xnew, double tol) {
    auto& t = tmp_;
    for (std::size_t i = 0; i < n_; ++i) t[i] = x[i] + h * kA21 * k1_[i];
    rhs(t, k2_);
    for (std::size_t i = 0; i < n_; ++i) t[i] = x[i] + h * (kA31 * k1_[i] + kA32 * k2_[i]);
    rhs(t, k3_);
    for (std::size_t i = 0; i < n_; ++i)
      t[i] = x[i] + h * (kA41 * k1_[i] + kA42 * k2_[i] + kA43 * k3_[i]);
    rhs(t, k4_);
    for (std::size_t i = 0; i < n_; ++i)
      t[i] = x[i] + h * (kA51 * k1_[i] + kA52 * k2_[i] + kA53 * k3_[i] + kA54 * k4_[i]);
    rhs(t, k5_);
    for (std::size_t i = 0; i < n_; ++i)
      t[i] = x[i] + h * (kA61 * k1_[i] + kA62 * k2_[i] + kA63 * k3_[i] + kA64 * k4_[i] + kA65 * k5_[i]);
    rhs(t, k6_);
    for (std::size_t i = 0; i < n_; ++i)
      xnew[i] = x[i] + h * (kB1 * k1_[i] + kB3 * k3_[i] + kB4 * k4_[i] + kB5 * k5_[i] + kB6 * k6_[i]);
    rhs(xnew, k7_);
    double acc = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      double e = h * (kE1 * k1_[i] + kE3 * k3_[i] + kE4 * k4_[i] + kE5 * k5_[i] + kE6 * k6_[i] +
                      kE7 * k7_[i]);
      double sc = tol * (1.0 + std::max(std::abs(x[i]), std::abs(xnew[i])));
      acc += (e / sc) * (e / sc);
    }
    return std::sqrt(acc / static_cast<double>(n_));
  }

  void prime(const std::vector<double>& x) { rhs(x, k1_); }
  void accept_fsal() { k1_.swap(k7_); }

 private:
  const System& sys_;
  double u_;
  double sign_;
  std::size_t n_;
  std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, ft_, gt_, err_;
  std::vector<double> stack_;
};

void check_finite(const std::vector<double>& x, double t) {
  for (double v : x)
    if (!std::isfinite(v)) throw IntegrationError("state became non-finite at t=" + std::to_string(t), t);
}

}  // namespace

void flow_affine(const System& sys, std::vector<double>& x, double u, double duration,
                 const IntegratorOptions& opts, Trajectory* dense, double t_offset) {
  double span = std::abs(duration);
  bool reverse = duration < 0.0;
  if (span == 0.0) return;
  AffineStepper stepper(sys, u, reverse);
  stepper.prime(x);

  double tau = 0.0;  // local time in [0, span]
  double h = opts.fixed_step > 0.0 ? std::min(opts.fixed_step, span)
                                   : std::min(span, 0.1 * (1.0 + 0.25 * span));
  std::vector<double> xnew(x.size());
  std::size_t steps = 0;
  while (tau < span) {
    if (++steps > opts.max_steps)
      throw IntegrationError("step budget exhausted at t=" + std::to_string(t_offset + tau),
                             t_offset + tau);
    bool clipped = false;
    if (tau + h >= span) {
      h = span - tau;  // land exactly on the boundary
      clipped = true;
    }
    double err = stepper.step(x, h, xnew, opts.tol);
    if (opts.fixed_step > 0.0 || err <= 1.0) {
      tau = clipped ? span : tau + h;
      x.swap(xnew);
      check_finite(x, t_offset + tau);
      stepper.accept_fsal();
      if (dense) dense->points.push_back({t_offset + tau, x, reverse ? -u : u});
      if (opts.fixed_step > 0.0)
        h = opts.fixed_step;
      else
        h *= std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
    } else {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (h < 1e-14 * std::max(1.0, tau))
        throw IntegrationError("step size underflow at t=" + std::to_string(t_offset + tau),
                               t_offset + tau);
    }
  }
}

Trajectory integrate_schedule(const System& sys, std::span<const double> x0,
                              const ControlSchedule& schedule, const IntegratorOptions& opts) {
  if (static_cast<int>(x0.size()) != sys.dim())
    throw DimensionError("initial state dimension does not match system");
  Trajectory traj;
  std::vector<double> x(x0.begin(), x0.end());
  double u0 = schedule.segments.empty() ? 0.0 : schedule.segments.front().value;
  traj.points.push_back({0.0, x, u0});
  double t = 0.0;
  for (const auto& seg : schedule.segments) {
    if (seg.duration < 0.0) throw PreconditionError("schedule segment with negative duration");
    if (seg.duration == 0.0) continue;
    flow_affine(sys, x, seg.value, seg.duration, opts, &traj, t);
    t += seg.duration;
  }
  return traj;
}

double max_v_along(const System& sys, const Trajectory& traj) {
  double m = -std::numeric_limits<double>::infinity();
  std::vector<double> stack;
  for (const auto& p : traj.points) m = std::max(m, sys.v_at(p.x, stack));
  return m;
}

}  // namespace liestab
