#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mastrack/scenario_io.hpp"
#include "mastrack/simulation.hpp"

using namespace mastrack;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json fixture_json(const std::string& name) {
  std::ifstream in(fixture_dir() / name);
  return json::parse(in);
}

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("mastrack_test_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST_SUITE("scenario_io") {
  TEST_CASE("bundled second-order fixture") {
    const Scenario s = load_fixture("section5_second_order.json");
    CHECK(s.order == Order::Second);
    CHECK(s.init.x == std::vector<double>{3, 0, -2, 1, -1});
    CHECK(s.init.v == std::vector<double>{1, -2, 3, 0, -1});
    CHECK(s.init.x0 == 0.0);
    CHECK(s.init.v0 == 0.0);
    CHECK(s.gains.k == 0.5);
    CHECK(s.gains.l == 1.0);
    CHECK(s.n() == 5);
    CHECK(s.signals.u0.value(0.0) == -2.0);
    CHECK(s.signals.f0.value(0.0) == -1.0);
    CHECK(s.signals.f[2].value(10.0) == doctest::Approx(3.0));
  }

  TEST_CASE("the first-order fixture says it is constructed") {
    const Scenario s = load_fixture("section5_first_order.json");
    CHECK(s.order == Order::First);
    CHECK(s.description.find("Constructed") != std::string::npos);
  }

  TEST_CASE("missing gains.k is reported by path") {
    json j = fixture_json("section5_first_order.json");
    j["gains"].erase("k");
    CHECK_THROWS_WITH_AS(scenario_from_json(j), doctest::Contains("gains.k"), ScenarioError);
  }

  TEST_CASE("signal count must match the follower count") {
    json j = fixture_json("section5_first_order.json");
    j["signals"]["f"].erase(3);
    CHECK_THROWS_WITH_AS(scenario_from_json(j), doctest::Contains("signals.f: expected 5 entries, got 4"),
                         ValidationError);
  }

  TEST_CASE("other schema violations name their paths") {
    json j = fixture_json("section5_second_order.json");
    j["gains"]["extra"] = 1;
    CHECK_THROWS_WITH_AS(scenario_from_json(j), doctest::Contains("gains.extra: unknown field"), ScenarioError);
    j = fixture_json("section5_second_order.json");
    j["init"]["x"] = {1, 2};
    CHECK_THROWS_WITH_AS(scenario_from_json(j), doctest::Contains("init.x"), ValidationError);
    j = fixture_json("section5_second_order.json");
    j["signals"]["u0"] = json{{"sawtooth", 1}};
    CHECK_THROWS_WITH_AS(scenario_from_json(j), doctest::Contains("signals.u0"), ScenarioError);
    j = fixture_json("section5_first_order.json");
    j["init"]["v"] = {1, 2, 3, 4, 5};
    CHECK_THROWS_AS(scenario_from_json(j), ValidationError);
    j = fixture_json("section5_first_order.json");
    j["order"] = "third";
    CHECK_THROWS_WITH_AS(scenario_from_json(j), doctest::Contains("order"), ValidationError);
    CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ScenarioError);
  }

  TEST_CASE("signal grammar accepts shorthand forms") {
    CHECK(signal_from_json(json(2.5)) == SignalSpec::constant(2.5));
    CHECK(signal_from_json(json{{"ramp", 0.3}}) == SignalSpec::ramp(0.3));
    const auto c = signal_from_json(json{{"cos", {{"amp", -2}, {"omega", 0.5}}}});
    CHECK(c == SignalSpec::sinusoid(-2, 0.5, 0.0));
    CHECK(signal_from_json(signal_to_json(c)) == c);
  }

  TEST_CASE("load, serialize, load round-trips") {
    for (const char* name : {"section5_first_order.json", "section5_second_order.json",
                             "constant_signals_first_order.json", "constant_signals_second_order.json"}) {
      const Scenario a = load_fixture(name);
      const Scenario b = scenario_from_json(json::parse(scenario_to_json(a).dump()));
      CHECK(a == b);
      const fs::path p = temp_path(name);
      save_scenario(a, p);
      CHECK(load_scenario(p) == a);
      fs::remove(p);
      CHECK(scenario_digest(a) == scenario_digest(b));
      CHECK(scenario_digest(a).size() == 16);
    }
    CHECK(scenario_digest(load_fixture("section5_first_order.json")) !=
          scenario_digest(load_fixture("section5_second_order.json")));
  }

  TEST_CASE("trace export layout and lossless round trip") {
    Scenario s = load_fixture("section5_first_order.json");
    s.integration.t_end = 1.0;
    s.integration.record_stride = 10;
    const SimTrace tr = run_scenario(s);
    CHECK(tr.derived.width() == 36);
    CHECK(tr.derived.columns.front() == "t");
    CHECK(tr.derived.columns.back() == "err_f_norm");

    const Table& t = tr.derived;
    CHECK(t.at(0, t.column("t")) == 0.0);
    CHECK(t.at(0, t.column("x0")) == s.init.x0);
    for (std::size_t i = 0; i < 5; ++i) CHECK(t.at(0, t.column("x_" + std::to_string(i + 1))) == s.init.x[i]);

    const fs::path p = temp_path("trace.csv");
    export_trace(tr, p);
    const Table back = read_table_csv(p);
    fs::remove(p);
    CHECK(back.columns == t.columns);
    CHECK(back.values == t.values);

    s = load_fixture("section5_second_order.json");
    s.integration.t_end = 0.1;
    CHECK(run_scenario(s).derived.width() == 53);
  }

  TEST_CASE("unwritable paths are errors") {
    Table t;
    t.columns = {"a"};
    t.values = {1.0};
    CHECK_THROWS(export_table(t, "/nonexistent/dir/out.csv"));
  }

  TEST_CASE("fixture directory override") {
    const fs::path original = fixture_dir();
    ::setenv("MAS_TRACK_FIXTURES", "/tmp/elsewhere", 1);
    CHECK(fixture_dir() == fs::path("/tmp/elsewhere"));
    ::unsetenv("MAS_TRACK_FIXTURES");
    CHECK(fixture_dir() == original);
  }
}
