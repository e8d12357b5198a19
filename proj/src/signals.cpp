#include "mastrack/signals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mastrack {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

SignalSample eval_term(const SignalTerm& term, double t) {
  return std::visit(
      overloaded{
          [](const ConstantTerm& c) { return SignalSample{c.value, 0.0}; },
          [t](const RampTerm& r) { return SignalSample{r.slope * t, r.slope}; },
          [t](const SinusoidTerm& s) {
            const double arg = s.omega * t + s.phase;
            return SignalSample{s.amplitude * std::cos(arg), -s.amplitude * s.omega * std::sin(arg)};
          },
          [t](const PolynomialTerm& p) {
            // Horner for value and derivative together.
            double value = 0.0;
            double deriv = 0.0;
            for (auto it = p.coefficients.rbegin(); it != p.coefficients.rend(); ++it) {
              deriv = deriv * t + value;
              value = value * t + *it;
            }
            return SignalSample{value, deriv};
          },
      },
      term);
}

}  // namespace

SignalSample SignalSpec::eval(double t) const {
  SignalSample out;
  for (const auto& term : terms_) {
    const auto s = eval_term(term, t);
    out.value += s.value;
    out.derivative += s.derivative;
  }
  return out;
}

double SignalSpec::derivative_bound(double t0, double t1, double sample_step) const {
  double slope_sum = 0.0;
  int sinusoids = 0;
  double sinusoid_rate = 0.0;
  bool closed_form = true;
  for (const auto& term : terms_) {
    if (const auto* r = std::get_if<RampTerm>(&term)) {
      slope_sum += r->slope;
    } else if (const auto* s = std::get_if<SinusoidTerm>(&term)) {
      ++sinusoids;
      sinusoid_rate += std::abs(s->amplitude * s->omega);
    } else if (std::holds_alternative<PolynomialTerm>(term)) {
      closed_form = false;
    }
  }
  if (closed_form && sinusoids <= 1) return std::abs(slope_sum) + sinusoid_rate;

  if (!(t1 > t0)) throw std::invalid_argument("derivative_bound: empty horizon");
  if (!(sample_step > 0.0)) throw std::invalid_argument("derivative_bound: sample_step must be positive");
  const auto samples = static_cast<std::size_t>(std::ceil((t1 - t0) / sample_step));
  double sup = 0.0;
  for (std::size_t k = 0; k <= samples; ++k) {
    const double t = std::min(t0 + static_cast<double>(k) * sample_step, t1);
    sup = std::max(sup, std::abs(derivative(t)));
  }
  return kSampledBoundInflation * sup;
}

RateBounds rate_bounds(const SignalSpec& u0, const SignalSpec& f0, const std::vector<SignalSpec>& f,
                       Horizon horizon, double sample_step) {
  if (!(horizon.t1 > horizon.t0)) throw std::invalid_argument("rate_bounds: empty horizon");
  RateBounds rb;
  rb.w = u0.derivative_bound(horizon.t0, horizon.t1, sample_step);
  rb.q0 = std::sqrt(static_cast<double>(f.size())) *
          f0.derivative_bound(horizon.t0, horizon.t1, sample_step);
  // ||df/dt(t)|| <= sqrt(sum_i sup|df_i/dt|^2), tight when the rates are constant.
  double acc = 0.0;
  for (const auto& fi : f) {
    const double b = fi.derivative_bound(horizon.t0, horizon.t1, sample_step);
    acc += b * b;
  }
  rb.q1 = std::sqrt(acc);
  return rb;
}

}  // namespace mastrack
