#pragma once

// Tracking-error certificates.
//
// First order (closed form, lambda = lambda_min(H)):
//   ||e_0f(t)|| <= ||e_0f(0)|| + q0/lambda,      limit q0/lambda
//   ||e_f(t)||  <= ||e_f(0)|| + q1/l,            limit q1/l
//   ||e(t)||    <= ||e(0)|| + (||e_0f(0)|| + ||e_u(0)|| + ||e_f(0)|| + q0/lambda + q1/l) / (k lambda)
//   limit          (q0/lambda + q1/l) / (k lambda)
//
// Second order: with P_j solving P_j Q_j + Q_j^T P_j = -I and
// c_j = lambda_max(P_j) ||P_j|| / lambda_min(P_j), r_j = sqrt(lambda_max(P_j) / lambda_min(P_j)),
//   ||e_0vf(t)|| <= r1 ||e_0vf(0)|| + c1 sqrt(2 (||e_u(0)||^2 + q0^2)),  limit sqrt2 c1 q0
//   ||e_vf(t)||  <= r2 ||e_vf(0)|| + sqrt2 c2 q1,                         limit sqrt2 c2 q1
//   ||e(t)||     <= r3 ||e(0)|| + c3 (2 r2 ||e_vf(0)|| + 2 sqrt2 c2 q1 + 2 r1 ||e_0vf(0)||
//                                     + 2 c1 sqrt(2 (||e_u(0)||^2 + q0^2)) + sqrt2 ||e_u(0)||)
//   limit           c3 (2 sqrt2 c2 q1 + 2 sqrt2 c1 q0)

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mastrack/scenario.hpp"
#include "mastrack/simulation.hpp"

namespace mastrack {

class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BoundCertificate {
  Order order = Order::First;
  double lambda_min_h = 0.0;
  double transient_bound = 0.0;   // delta
  double asymptotic_bound = 0.0;  // epsilon
  std::map<std::string, double> sub_bounds;
  // inputs
  RateBounds rates;
  double k = 0.0;
  double l = 0.0;
  ErrorNorms initial;
};

/// Throws CertificationError("leader not globally reachable") when
/// lambda_min(H) <= kReachabilityTolerance.
BoundCertificate certify_first_order(const GraphMatrices& graph, const Gains& gains,
                                     const RateBounds& rates, const ErrorNorms& initial);

/// Throws CertificationError naming the block when a Q_j is not Hurwitz.
BoundCertificate certify_second_order(const GraphMatrices& graph, const Gains& gains,
                                      const RateBounds& rates, const ErrorNorms& initial);

/// Rate bounds over [0, t_end] sampled at a tenth of the step.
RateBounds scenario_rate_bounds(const Scenario& s);

/// Builds the graph, rate bounds and initial errors from the scenario.
BoundCertificate certify(const Scenario& s);

struct ClaimVerdict {
  std::string name;
  bool pass = false;
  double observed = 0.0;  // worst value over the checked window
  double bound = 0.0;     // including any slack
  [[nodiscard]] double margin() const { return bound - observed; }
};

struct VerificationReport {
  std::vector<ClaimVerdict> claims;
  [[nodiscard]] bool all_pass() const;
  [[nodiscard]] const ClaimVerdict& claim(const std::string& name) const;
};

inline constexpr double kLeaderDistSlack = 1e-9;
inline constexpr double kLocalDistSlack = 1e-6;

/// Checks a trace against its certificate: transient bounds for all t and
/// asymptotic bounds for t >= settle_time. Throws std::invalid_argument when
/// the certificate and trace orders differ or the trace ends before
/// settle_time.
VerificationReport verify_bounds(const SimTrace& trace, const BoundCertificate& cert,
                                 double settle_time);

}  // namespace mastrack
