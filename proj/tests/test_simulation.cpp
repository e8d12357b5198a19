#include <cmath>

#include "doctest.h"
#include "mastrack/scenario_io.hpp"
#include "mastrack/simulation.hpp"

using namespace mastrack;

TEST_SUITE("simulation") {
  TEST_CASE("trace column layout") {
    const auto first = trace_columns(Order::First, 5);
    CHECK(first.size() == 36);
    CHECK(first[1] == "x0");
    CHECK(first[2] == "x_1");
    const auto second = trace_columns(Order::Second, 5);
    CHECK(second.size() == 53);
    CHECK(second[2] == "v0");
  }

  TEST_CASE("metadata and digest") {
    Scenario s = load_fixture("section5_second_order.json");
    s.integration.t_end = 0.5;
    const SimTrace tr = run_scenario(s);
    CHECK(tr.metadata.order == "second");
    CHECK(tr.metadata.scenario_digest == scenario_digest(s));
    CHECK(tr.times.size() == 501);
  }

  TEST_CASE("initial error norms") {
    const Scenario s = load_fixture("section5_first_order.json");
    const ErrorNorms e = initial_error_norms(s);
    CHECK(e.e == doctest::Approx(std::sqrt(9.0 + 0 + 4 + 1 + 1)));
    CHECK(e.e_u == doctest::Approx(std::sqrt(5.0) * 2.0));  // uhat0 = 0, u0(0) = -2
    CHECK(e.e_0f == doctest::Approx(std::sqrt(5.0)));      // fhat0 = 0, f0(0) = -1
    // fhat = l x, f(0) = 0
    CHECK(e.e_f == doctest::Approx(std::sqrt(15.0)));
  }

  TEST_CASE("followers without a leader link never read leader data") {
    Scenario s = load_fixture("section5_second_order.json");
    s.integration.t_end = 2.0;
    LeaderAudit audit(5);
    run_scenario(s, &audit);
    CHECK(audit.violations == 0);
    CHECK(audit.position_reads[0] > 0);
    CHECK(audit.input_reads[0] > 0);
    for (std::size_t i = 1; i < 5; ++i) {
      CHECK(audit.position_reads[i] == 0);
      CHECK(audit.input_reads[i] == 0);
    }

    Scenario f = load_fixture("constant_signals_first_order.json");
    f.integration.t_end = 1.0;
    LeaderAudit a1(5);
    run_scenario(f, &a1);
    CHECK(a1.violations == 0);
    CHECK(a1.position_reads[1] == 0);
    CHECK(a1.position_reads[2] > 0);
  }

  TEST_CASE("twin integration agrees on the linear blocks over a short horizon") {
    for (const char* name : {"section5_first_order.json", "section5_second_order.json"}) {
      Scenario s = load_fixture(name);
      s.integration.t_end = 5.0;
      const OracleReport rep = compare_with_oracle(s);
      REQUIRE(rep.blocks.size() == 4);
      CHECK(rep.blocks[0] == "e_u");
      for (std::size_t b = 1; b < 4; ++b) CHECK(rep.max_diff[b] <= 1e-6);
      CHECK(rep.series.width() == 5);
    }
  }

  TEST_CASE("smoothed signum still runs and differs from the exact one") {
    Scenario s = load_fixture("section5_first_order.json");
    s.integration.t_end = 5.0;
    const auto exact = run_scenario(s);
    s.integration.sgn_smoothing_epsilon = 1e-2;
    const auto smooth = run_scenario(s);
    CHECK(exact.derived.values != smooth.derived.values);
  }
}
