#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "liestab/config.hpp"
#include "liestab/verify.hpp"

using namespace liestab;

TEST_CASE("scenario round trip is idempotent") {
  std::string text = R"json({
    "system": {"template": "chain_power", "L": 5, "a": "2 + sin(x1)", "b": "1 + x2^2"},
    "synth": {"x0": [0.5, 0, 0], "duration_cap": 0.1},
    "simulation": {"partition": {"rule": "random", "lo": 0.1, "hi": 0.3}, "seed": 9}
  })json";
  ScenarioConfig cfg = scenario_from_json_text(text);
  std::string once = scenario_to_json_text(cfg);
  std::string twice = scenario_to_json_text(scenario_from_json_text(once));
  CHECK(once == twice);
  CHECK(cfg.system.L == 5);
  CHECK(cfg.simulation.partition_rule == "random");
}

TEST_CASE("defaults fill in missing blocks") {
  ScenarioConfig cfg = scenario_from_json_text(R"json({"system": {"template": "chain_power"}})json");
  CHECK(cfg.system.L == 3);
  CHECK(cfg.classifier.grid.step == 0.25);
  CHECK(cfg.synth.params.rho_values.size() == 4);
  CHECK(cfg.simulation.horizon == 200.0);
  CHECK(cfg.output.formats.size() == 2);
}

TEST_CASE("config validation rejects bad content") {
  CHECK_THROWS_AS(scenario_from_json_text("not json at all"), PreconditionError);
  CHECK_THROWS_AS(scenario_from_json_text(R"json({"system": {"template": "chain_power", "L": 2}})json"),
                  PreconditionError);
  CHECK_THROWS_AS(scenario_from_json_text(R"json({"system": {"template": "chain_power", "L": 4}})json"),
                  PreconditionError);
  CHECK_THROWS_AS(scenario_from_json_text(R"json({"system": {"template": "nope"}})json"),
                  PreconditionError);
  CHECK_THROWS_AS(
      scenario_from_json_text(R"json({"system": {"template": "chain_power", "a": "x9 + 1"}})json"),
      ParseError);
  CHECK_THROWS_AS(scenario_from_json_text(R"json({"output": {"formats": ["xml"]}})json"),
                  PreconditionError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/path.json"), IoError);
}

TEST_CASE("custom template builds an arbitrary system") {
  std::string text = R"json({
    "system": {"template": "custom", "n": 2,
               "f": ["-x1", "0"], "g": ["0", "1"], "V": "0.5*x1^2 + 0.5*x2^2"}
  })json";
  ScenarioConfig cfg = scenario_from_json_text(text);
  System sys = build_system(cfg.system);
  CHECK(sys.dim() == 2);
  std::vector<double> x{1.0, 0.5};
  CHECK(sys.v_at(x) == doctest::Approx(0.625));
}

TEST_CASE("bracket regression oracle passes for the chain-power family") {
  for (auto [L, a, b] : std::vector<std::tuple<int, std::string, std::string>>{
           {3, "1", "1"}, {5, "1", "1"}, {3, "2 + sin(x1)", "1 + x2^2"}}) {
    RegressionReport rep = bracket_regression(L, a, b, 25, 99);
    CHECK_MESSAGE(rep.all_pass(), "L=", L, " a=", a, " b=", b);
  }
  // Negative control: the flipped convention must fail.
  RegressionReport flipped =
      bracket_regression(3, "1", "1", 25, 99, 1e-8, BracketConvention::Flipped);
  CHECK(!flipped.all_pass());
}
