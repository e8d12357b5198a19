#pragma once

// Second-order leader-follower tracking: x_i' = v_i, v_i' = u_i + f_i.
//
// No agent measures velocity. Follower i reconstructs everything it needs
// from positions, the leader broadcast (when b_i > 0) and its neighbours'
// estimates:
//   vhat0_i = z_v0_i + b_i x0      leader velocity
//   fhat0_i = z_f0_i + vhat0_i     leader disturbance
//   vhat_i  = z_v_i  + l x_i       own velocity
//   fhat_i  = z_f_i  + vhat_i      own disturbance
// and applies
//   u_i = -k [sum_j a_ij (x_i - x_j) + b_i (x_i - x0)] - (vhat_i - vhat0_i)
//         + uhat0_i + fhat0_i - fhat_i.
// The input observer (uhat0, d) is the one used in first order.

#include <cstddef>
#include <span>

#include "mastrack/first_order.hpp"

namespace mastrack::second_order {

/// Flat layout [x0 | v0 | x | v | u_hat0 | d | z_v0 | z_f0 | z_v | z_f],
/// dimension 2 + 8N.
struct Layout {
  std::size_t n = 0;
  [[nodiscard]] std::size_t dim() const noexcept { return 2 + 8 * n; }
  [[nodiscard]] std::size_t x0() const noexcept { return 0; }
  [[nodiscard]] std::size_t v0() const noexcept { return 1; }
  [[nodiscard]] std::size_t x() const noexcept { return 2; }
  [[nodiscard]] std::size_t v() const noexcept { return 2 + n; }
  [[nodiscard]] std::size_t u_hat0() const noexcept { return 2 + 2 * n; }
  [[nodiscard]] std::size_t d() const noexcept { return 2 + 3 * n; }
  [[nodiscard]] std::size_t z_v0() const noexcept { return 2 + 4 * n; }
  [[nodiscard]] std::size_t z_f0() const noexcept { return 2 + 5 * n; }
  [[nodiscard]] std::size_t z_v() const noexcept { return 2 + 6 * n; }
  [[nodiscard]] std::size_t z_f() const noexcept { return 2 + 7 * n; }
};

/// What a follower is allowed to use: no velocities.
struct State {
  double x0 = 0.0;
  std::span<const double> x, u_hat0, d, z_v0, z_f0, z_v, z_f;

  static State view(std::span<const double> flat, std::size_t n);
  [[nodiscard]] std::size_t size() const noexcept { return x.size(); }
};

struct Estimates {
  Vector v_hat0, f_hat0, v_hat, f_hat;
};

/// Evaluated in the fixed order vhat0 -> fhat0 -> vhat -> fhat.
Estimates estimates(const State& s, const Gains& gains, const LeaderAccess& leader);

Vector controller(const State& s, const Estimates& est, const Gains& gains, const GraphMatrices& graph,
                  const LeaderAccess& leader);

/// z_v0_i' = -b_i z_v0_i - b_i^2 x0 - sum_j a_ij (vhat0_i - vhat0_j) + fhat0_i + uhat0_i
Vector leader_velocity_observer_rhs(const State& s, const Estimates& est, const GraphMatrices& graph,
                                    const LeaderAccess& leader);

/// z_f0_i' = -z_f0_i - vhat0_i - uhat0_i
Vector leader_dist_observer_rhs(const State& s, const Estimates& est);

/// z_v_i' = -l z_v_i - l^2 x_i + fhat_i + u_i
Vector own_velocity_observer_rhs(const State& s, const Estimates& est, const Gains& gains,
                                 std::span<const double> u);

/// z_f_i' = -z_f_i - vhat_i - u_i
Vector own_dist_observer_rhs(const State& s, const Estimates& est, std::span<const double> u);

/// Full closed loop at time t; writes 2 + 8N derivatives into `dxdt`.
/// Velocities enter only the kinematics x' = v.
void closed_loop_rhs(std::span<const double> flat, const Gains& gains, const GraphMatrices& graph,
                     const ScenarioSignals& signals, double t, std::span<double> dxdt,
                     Signum sgn = {}, LeaderAudit* audit = nullptr);

/// Estimation and tracking errors against the true signals at time t.
/// Stacked vectors follow the error-system block order.
struct Errors {
  Vector e_u;    // N:  uhat0 - u0
  Vector e_0vf;  // 2N: [vhat0 - v0 ; fhat0 - f0]
  Vector e_vf;   // 2N: [vhat - v ; fhat - f]
  Vector e;      // 2N: [x - x0 ; v - v0]
};

Errors extract_errors(std::span<const double> flat, const Gains& gains, const GraphMatrices& graph,
                      const ScenarioSignals& signals, double t);

struct ErrorRates {
  Vector de_u, de_0vf, de_vf, de;
};

/// H and the assembled Q1, Q2, Q3 for a given graph and gains.
struct ErrorBlocks {
  linalg::Matrix h, q1, q2, q3;
  static ErrorBlocks build(const GraphMatrices& graph, const Gains& gains);
};

/// The block-linear error systems
///   e_0vf' = Q1 e_0vf + [e_u ; -f0' 1]
///   e_vf'  = Q2 e_vf  + [0 ; -f']
///   e'     = Q3 e     + [0 ; -e_v + e_0v + e_0f - e_f + e_u]
/// plus e_u' = -H e_u - D sgn(H e_u) - u0' 1. `e_u_feed` is the e_u that
/// drives the linear blocks (normally the closed loop's own value).
ErrorRates error_oracle_rhs(const Errors& err, std::span<const double> e_u_feed,
                            std::span<const double> d, const ErrorBlocks& blocks,
                            double du0, double df0, std::span<const double> df, Signum sgn = {});

}  // namespace mastrack::second_order
