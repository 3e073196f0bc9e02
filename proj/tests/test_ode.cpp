#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "liestab/ode.hpp"
#include "support/oracles.hpp"

using namespace liestab;

namespace {

System decay_system() {
  // dx/dt = -x with a spectator control field.
  return System::make(make_vector_field(1, {"-x1"}), make_vector_field(1, {"0"}),
                      parse("0.5*x1^2", 1));
}

System chain3() { return chain_power_system(3, "1", "1"); }

}  // namespace

TEST_CASE("decay endpoint matches the analytic solution") {
  System sys = decay_system();
  ControlSchedule s{{{1.0, 0.0}}};
  std::vector<double> x0{1.0};
  Trajectory traj = integrate_schedule(sys, x0, s, IntegratorOptions{1e-10, 0.0, 1000000});
  CHECK(traj.back().t == 1.0);
  CHECK(std::abs(traj.back().x[0] - std::exp(-1.0)) <= 1e-6);
}

TEST_CASE("equilibrium stays put") {
  System sys = chain3();
  std::vector<double> x0{0.0, 0.0, 0.0};
  ControlSchedule s{{{1.0, 0.0}}};
  Trajectory traj = integrate_schedule(sys, x0, s, IntegratorOptions{1e-10, 0.0, 1000000});
  CHECK(norm2(traj.back().x) == 0.0);
}

TEST_CASE("constant input drives the integrator chain exactly") {
  // x3' = u, so u = -1 from x3 = 1 lands on x3(1) = 0.
  System sys = chain3();
  std::vector<double> x0{0.0, 0.0, 1.0};
  ControlSchedule s{{{1.0, -1.0}}};
  Trajectory traj = integrate_schedule(sys, x0, s, IntegratorOptions{1e-10, 0.0, 1000000});
  CHECK(std::abs(traj.back().x[2]) <= 1e-9);
}

TEST_CASE("steps never straddle segment boundaries") {
  System sys = decay_system();
  ControlSchedule s{{{0.3, 0.0}, {0.31, 1.0}, {0.17, -2.0}}};
  std::vector<double> x0{1.0};
  Trajectory traj = integrate_schedule(sys, x0, s, IntegratorOptions{1e-8, 0.0, 1000000});
  // Both interior boundaries appear exactly.
  bool saw_1 = false, saw_2 = false;
  for (const auto& p : traj.points) {
    CHECK(p.t <= 0.3 + 0.31 + 0.17 + 1e-15);
    if (p.t == 0.3) saw_1 = true;
    if (p.t == 0.3 + 0.31) saw_2 = true;
  }
  CHECK(saw_1);
  CHECK(saw_2);
  CHECK(traj.back().t == 0.3 + 0.31 + 0.17);
}

TEST_CASE("fixed-step order check: halving the step shrinks the error by >= 8") {
  System sys = decay_system();
  std::vector<double> x0{1.0};
  auto endpoint_error = [&](double h) {
    std::vector<double> x = x0;
    flow_affine(sys, x, 0.0, 1.0, IntegratorOptions{1e-6, h, 1000000});
    return std::abs(x[0] - std::exp(-1.0));
  };
  double e1 = endpoint_error(0.1);
  double e2 = endpoint_error(0.05);
  CHECK(e2 > 0.0);
  CHECK(e1 / e2 >= 8.0);
}

TEST_CASE("adaptive tolerance bounds the endpoint error") {
  System sys = chain3();
  std::vector<double> x0{0.4, -0.3, 0.8};
  auto endpoint = [&](double tol) {
    std::vector<double> x = x0;
    flow_affine(sys, x, 0.7, 2.0, IntegratorOptions{tol, 0.0, 1000000});
    return x;
  };
  auto ref = endpoint(1e-13);
  auto loose = endpoint(1e-8);
  double err = 0.0;
  for (std::size_t i = 0; i < 3; ++i) err = std::max(err, std::abs(ref[i] - loose[i]));
  CHECK(err <= 1e-6);
}

TEST_CASE("negative duration flows backward") {
  System sys = decay_system();
  std::vector<double> x{1.0};
  flow_affine(sys, x, 0.0, 1.0, IntegratorOptions{1e-12, 0.0, 1000000});
  flow_affine(sys, x, 0.0, -1.0, IntegratorOptions{1e-12, 0.0, 1000000});
  CHECK(std::abs(x[0] - 1.0) <= 1e-9);
}

TEST_CASE("finite-time blow-up reports step underflow") {
  // dx/dt = 1 + x^2 escapes to infinity before t = 2.
  System sys = System::make(make_vector_field(1, {"1 + x1^2"}), make_vector_field(1, {"0"}),
                            parse("0.5*x1^2", 1));
  std::vector<double> x{1.0};
  CHECK_THROWS_AS(flow_affine(sys, x, 0.0, 2.0, IntegratorOptions{1e-10, 0.0, 1000000}),
                  IntegrationError);
}

TEST_CASE("schedules reject negative durations") {
  System sys = decay_system();
  std::vector<double> x0{1.0};
  ControlSchedule bad{{{-0.5, 0.0}}};
  CHECK_THROWS_AS(integrate_schedule(sys, x0, bad, IntegratorOptions{}), PreconditionError);
}
