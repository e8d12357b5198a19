#pragma once

// Exogenous time functions: leader input u0(t), leader disturbance f0(t) and
// follower disturbances f_i(t). Every signal is a finite sum of primitives
// with a closed-form derivative so that the rate bounds w, q0, q1 can be
// checked rather than trusted.

#include <cstddef>
#include <variant>
#include <vector>

namespace mastrack {

struct ConstantTerm {
  double value = 0.0;
  friend bool operator==(const ConstantTerm&, const ConstantTerm&) = default;
};

struct RampTerm {
  double slope = 0.0;
  friend bool operator==(const RampTerm&, const RampTerm&) = default;
};

/// amplitude * cos(omega * t + phase)
struct SinusoidTerm {
  double amplitude = 0.0;
  double omega = 0.0;
  double phase = 0.0;
  friend bool operator==(const SinusoidTerm&, const SinusoidTerm&) = default;
};

/// c0 + c1 t + c2 t^2 + ...
struct PolynomialTerm {
  std::vector<double> coefficients;
  friend bool operator==(const PolynomialTerm&, const PolynomialTerm&) = default;
};

using SignalTerm = std::variant<ConstantTerm, RampTerm, SinusoidTerm, PolynomialTerm>;

struct SignalSample {
  double value = 0.0;
  double derivative = 0.0;
};

class SignalSpec {
 public:
  SignalSpec() = default;
  explicit SignalSpec(std::vector<SignalTerm> terms) : terms_(std::move(terms)) {}

  static SignalSpec constant(double c) { return SignalSpec({ConstantTerm{c}}); }
  static SignalSpec ramp(double slope) { return SignalSpec({RampTerm{slope}}); }
  static SignalSpec sinusoid(double amplitude, double omega, double phase = 0.0) {
    return SignalSpec({SinusoidTerm{amplitude, omega, phase}});
  }
  static SignalSpec polynomial(std::vector<double> coefficients) {
    return SignalSpec({PolynomialTerm{std::move(coefficients)}});
  }

  [[nodiscard]] const std::vector<SignalTerm>& terms() const noexcept { return terms_; }

  [[nodiscard]] SignalSample eval(double t) const;
  [[nodiscard]] double value(double t) const { return eval(t).value; }
  [[nodiscard]] double derivative(double t) const { return eval(t).derivative; }

  /// sup |d/dt signal| over [t0, t1]. Exact for sums of constants, ramps and
  /// at most one sinusoid; otherwise sampled with spacing `sample_step` and
  /// inflated by 1%.
  [[nodiscard]] double derivative_bound(double t0, double t1, double sample_step) const;

  friend bool operator==(const SignalSpec&, const SignalSpec&) = default;

 private:
  std::vector<SignalTerm> terms_;
};

/// Upper bounds of Assumptions on the leader input and disturbance rates.
struct RateBounds {
  double w = 0.0;   // sup |du0/dt|
  double q0 = 0.0;  // sup ||df0/dt * 1_N||
  double q1 = 0.0;  // sup ||[df_1/dt ... df_N/dt]||
};

struct Horizon {
  double t0 = 0.0;
  double t1 = 0.0;
};

inline constexpr double kSampledBoundInflation = 1.01;

/// `sample_step` is the spacing used for signals without a closed-form
/// derivative bound (pass a tenth of the integration step).
RateBounds rate_bounds(const SignalSpec& u0, const SignalSpec& f0, const std::vector<SignalSpec>& f,
                       Horizon horizon, double sample_step);

/// Signals driving a leader-follower scenario.
struct ScenarioSignals {
  SignalSpec u0;
  SignalSpec f0;
  std::vector<SignalSpec> f;  // one per follower

  friend bool operator==(const ScenarioSignals&, const ScenarioSignals&) = default;
};

}  // namespace mastrack
