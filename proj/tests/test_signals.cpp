#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mastrack/signals.hpp"

using namespace mastrack;
constexpr double pi = std::numbers::pi;

TEST_SUITE("signals") {
  TEST_CASE("primitive values and derivatives") {
    const auto u0 = SignalSpec::sinusoid(-2.0, 0.1 * pi);
    CHECK(u0.value(0.0) == -2.0);
    CHECK(u0.derivative(0.0) == doctest::Approx(0.0).scale(1.0));
    const auto c = SignalSpec::constant(4.5);
    CHECK(c.value(17.0) == 4.5);
    CHECK(c.derivative(17.0) == 0.0);
    const auto r = SignalSpec::ramp(0.3);
    CHECK(r.value(10.0) == doctest::Approx(3.0));
    CHECK(r.derivative(10.0) == 0.3);
    const auto p = SignalSpec::polynomial({1.0, -2.0, 0.5});
    CHECK(p.value(2.0) == doctest::Approx(-1.0));
    CHECK(p.derivative(2.0) == doctest::Approx(0.0).scale(1.0));
  }

  TEST_CASE("derivative matches central differences") {
    const SignalSpec s({SinusoidTerm{1.3, 0.7, 0.4}, RampTerm{-0.2}, PolynomialTerm{{0.1, 0.0, -0.03, 0.002}},
                        ConstantTerm{2.0}});
    const double h = 1e-5;
    for (double t : {0.0, 0.37, 3.1, 12.0, 55.5}) {
      const double fd = (s.value(t + h) - s.value(t - h)) / (2 * h);
      CHECK(s.derivative(t) == doctest::Approx(fd).epsilon(1e-7));
      CHECK(std::isfinite(s.value(t)));
    }
  }

  TEST_CASE("rate bounds for the five-follower signals") {
    const auto u0 = SignalSpec::sinusoid(-2.0, 0.1 * pi);
    const auto f0 = SignalSpec::sinusoid(-1.0, 0.1 * pi);
    std::vector<SignalSpec> f;
    for (int i = 1; i <= 5; ++i) f.push_back(SignalSpec::ramp(0.1 * i));
    const RateBounds rb = rate_bounds(u0, f0, f, {0.0, 100.0}, 1e-4);
    CHECK(rb.w == doctest::Approx(0.2 * pi).epsilon(1e-12));
    CHECK(rb.q0 == doctest::Approx(0.1 * pi * std::sqrt(5.0)).epsilon(1e-12));
    CHECK(rb.q1 == doctest::Approx(std::sqrt(0.55)).epsilon(1e-12));

    // sampled cross-check at dt = 1e-3
    double w = 0.0, q0 = 0.0;
    for (int k = 0; k <= 100000; ++k) {
      const double t = k * 1e-3;
      w = std::max(w, std::abs(u0.derivative(t)));
      q0 = std::max(q0, std::abs(f0.derivative(t)) * std::sqrt(5.0));
    }
    CHECK(w <= rb.w);
    CHECK(w >= rb.w * (1 - 1e-6));
    CHECK(q0 <= rb.q0);
    CHECK(q0 >= rb.q0 * (1 - 1e-6));
  }

  TEST_CASE("constant signals have zero rate bounds") {
    const RateBounds rb = rate_bounds(SignalSpec::constant(-2), SignalSpec::constant(-1),
                                      {SignalSpec::constant(0.5), SignalSpec::constant(1.0)}, {0.0, 100.0}, 1e-4);
    CHECK(rb.w == 0.0);
    CHECK(rb.q0 == 0.0);
    CHECK(rb.q1 == 0.0);
  }

  TEST_CASE("single sinusoid bound is the amplitude times the frequency") {
    CHECK(SignalSpec::sinusoid(-3.0, 0.5, 1.0).derivative_bound(0.0, 100.0, 1e-3) == doctest::Approx(1.5));
  }

  TEST_CASE("sampled bounds cover the true supremum") {
    const SignalSpec two({SinusoidTerm{1.0, 1.0, 0.0}, SinusoidTerm{0.5, 3.0, 0.2}});
    double sup = 0.0;
    for (int k = 0; k <= 200000; ++k) sup = std::max(sup, std::abs(two.derivative(k * 5e-5)));
    CHECK(two.derivative_bound(0.0, 10.0, 1e-3) >= sup);
    CHECK(two.derivative_bound(0.0, 10.0, 1e-3) <= sup * kSampledBoundInflation * 1.001);
  }
}
