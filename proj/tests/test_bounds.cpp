#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "mastrack/acceptance.hpp"
#include "mastrack/bounds.hpp"
#include "mastrack/scenario_io.hpp"

using namespace mastrack;

namespace {

const Gains kGains{0.5, 1.0, std::vector<double>(5, 1.0)};

RateBounds section5_rates() { return {0.2 * M_PI, 0.1 * M_PI * std::sqrt(5.0), std::sqrt(0.55)}; }

// Zero disturbances, constant leader input known to everyone, zero initial errors.
Scenario quiet_scenario() {
  Scenario s = load_fixture("constant_signals_first_order.json");
  s.signals.f0 = SignalSpec::constant(0.0);
  s.signals.f.assign(5, SignalSpec::constant(0.0));
  s.init.x0 = 0.0;
  s.init.x.assign(5, 0.0);
  s.init.u_hat0.assign(5, s.signals.u0.value(0.0));
  s.integration.t_end = 60.0;
  return s;
}

}  // namespace

TEST_SUITE("bounds") {
  TEST_CASE("first order: zero rates and zero initial errors give zero bounds") {
    const GraphMatrices g = build_matrices(testutil::five_cycle());
    const auto c = certify_first_order(g, kGains, {}, {});
    CHECK(c.transient_bound == 0.0);
    CHECK(c.asymptotic_bound == 0.0);
    for (const auto& [name, v] : c.sub_bounds) CHECK(v == 0.0);
  }

  TEST_CASE("first order asymptotic bound by hand") {
    const GraphMatrices g = build_matrices(testutil::five_cycle());
    const double lam = testutil::smallest_root_by_bisection(g.h, 0.0, 0.3);
    const RateBounds r = section5_rates();
    const auto c = certify_first_order(g, kGains, r, {});
    CHECK(c.asymptotic_bound == doctest::Approx((r.q0 / lam + r.q1 / 1.0) / (0.5 * lam)).epsilon(1e-9));
    CHECK(c.asymptotic_bound == doctest::Approx(83.1701).epsilon(1e-5));

    Gains doubled = kGains;
    doubled.k = 1.0;
    CHECK(certify_first_order(g, doubled, r, {}).asymptotic_bound == doctest::Approx(c.asymptotic_bound / 2).epsilon(1e-15));

    const RateBounds scaled{r.w, 3 * r.q0, 3 * r.q1};
    CHECK(certify_first_order(g, kGains, scaled, {}).asymptotic_bound == doctest::Approx(3 * c.asymptotic_bound));
  }

  TEST_CASE("first order transient bound adds the initial errors") {
    const GraphMatrices g = build_matrices(testutil::five_cycle());
    const double lam = g.lambda_min_h;
    ErrorNorms init;
    init.e = 2.0;
    init.e_u = 1.0;
    init.e_0f = 0.5;
    init.e_f = 0.25;
    const auto c = certify_first_order(g, kGains, {}, init);
    CHECK(c.transient_bound == doctest::Approx(2.0 + 1.75 / (0.5 * lam)));
    CHECK(c.sub_bounds.at("leader_dist_transient") == 0.5);
    CHECK(c.sub_bounds.at("local_dist_transient") == 0.25);
  }

  TEST_CASE("unreachable leader is refused") {
    Topology t = testutil::five_cycle();
    t.leader_links.clear();
    CHECK_THROWS_WITH_AS(certify_first_order(build_matrices(t), kGains, {}, {}),
                         "leader not globally reachable", CertificationError);
    CHECK_THROWS_WITH_AS(certify(load_fixture("unreachable_leader.json")), "leader not globally reachable",
                         CertificationError);
  }

  TEST_CASE("second order: zero inputs give zero bounds") {
    const auto c = certify_second_order(build_matrices(testutil::five_cycle()), kGains, {}, {});
    CHECK(c.asymptotic_bound == 0.0);
    CHECK(c.transient_bound == 0.0);
    CHECK(c.sub_bounds.at("P1_residual") <= 1e-9);
    CHECK(c.sub_bounds.at("P2_residual") <= 1e-9);
    CHECK(c.sub_bounds.at("P3_residual") <= 1e-9);
  }

  TEST_CASE("second order asymptotic bound regression value") {
    const GraphMatrices g = build_matrices(testutil::five_cycle());
    const RateBounds r = section5_rates();
    const auto c = certify_second_order(g, kGains, r, {});
    CHECK(c.asymptotic_bound == doctest::Approx(5599022.7485659849).epsilon(1e-9));

    // same formula with P from the quadrature oracle
    auto gain = [&](linalg::BlockKind kind) {
      const auto p = lyapunov_by_quadrature(linalg::assemble_q(kind, g.h, 1.0, 0.5));
      const auto ev = linalg::symmetric_eigenvalues(p);
      return ev.back() * ev.back() / ev.front();
    };
    const double c1 = gain(linalg::BlockKind::Q1), c2 = gain(linalg::BlockKind::Q2), c3 = gain(linalg::BlockKind::Q3);
    const double eps = c3 * (2 * std::sqrt(2.0) * c2 * r.q1 + 2 * std::sqrt(2.0) * c1 * r.q0);
    CHECK(c.asymptotic_bound == doctest::Approx(eps).epsilon(1e-6));
  }

  TEST_CASE("second order bound is monotone and linear in the rates") {
    const GraphMatrices g = build_matrices(testutil::five_cycle());
    const RateBounds r = section5_rates();
    const double base = certify_second_order(g, kGains, r, {}).asymptotic_bound;
    CHECK(certify_second_order(g, kGains, {r.w, r.q0 * 1.1, r.q1}, {}).asymptotic_bound >= base);
    CHECK(certify_second_order(g, kGains, {r.w, r.q0, r.q1 * 1.1}, {}).asymptotic_bound >= base);
    CHECK(certify_second_order(g, kGains, {r.w, 2 * r.q0, 2 * r.q1}, {}).asymptotic_bound ==
          doctest::Approx(2 * base));
  }

  TEST_CASE("fixtures pass their own certificates") {
    const Scenario s = load_fixture("section5_first_order.json");
    const auto rep = verify_bounds(run_scenario(s), certify(s), 50.0);
    CHECK(rep.all_pass());
    CHECK(rep.claims.size() == 6);
    CHECK(rep.claim("tracking_asymptotic").observed > 0.0);
    CHECK_THROWS_AS((void)rep.claim("nope"), std::out_of_range);

    const Scenario quiet = quiet_scenario();
    const auto cert = certify(quiet);
    CHECK(cert.asymptotic_bound == 0.0);
    CHECK(verify_bounds(run_scenario(quiet), cert, 50.0).all_pass());
  }

  TEST_CASE("a halved asymptotic bound is caught") {
    const Scenario s = load_fixture("section5_first_order.json");
    const SimTrace tr = run_scenario(s);
    BoundCertificate cert = certify(s);
    const double observed = verify_bounds(tr, cert, 50.0).claim("tracking_asymptotic").observed;
    cert.asymptotic_bound = observed / 2.0;
    const auto rep = verify_bounds(tr, cert, 50.0);
    CHECK_FALSE(rep.claim("tracking_asymptotic").pass);
    CHECK(rep.claim("tracking_transient").pass);
  }

  TEST_CASE("mismatched inputs are rejected") {
    Scenario s = load_fixture("section5_first_order.json");
    s.integration.t_end = 10.0;
    const SimTrace tr = run_scenario(s);
    CHECK_THROWS_AS(verify_bounds(tr, certify(s), 50.0), std::invalid_argument);
    Scenario s2 = load_fixture("section5_second_order.json");
    s2.integration.t_end = 10.0;
    CHECK_THROWS_AS(verify_bounds(tr, certify(s2), 5.0), std::invalid_argument);
  }
}
