#pragma once

// First-order leader-follower tracking: x_i' = u_i + f_i for i = 0..N.
//
// Each follower runs
//   * the tracking controller
//       u_i = -k [sum_j a_ij (x_i - x_j) + b_i (x_i - x0)] + uhat0_i + fhat0_i - fhat_i
//   * an adaptive signum observer of the leader input u0 (gain d_i grows with
//     the consensus residual s_i),
//   * a distributed observer of the leader disturbance f0,
//       fhat0_i = z_f0_i + b_i x0,
//   * a local disturbance observer of its own f_i,
//       fhat_i = z_f_i + l x_i.
//
// Leader data (x0, u0) only ever enters follower i multiplied by b_i and is
// read through LeaderAccess, which never reads the broadcast for a follower
// with b_i = 0 and can audit every read.

#include <cstddef>
#include <span>
#include <vector>

#include "mastrack/graph.hpp"
#include "mastrack/integrator.hpp"
#include "mastrack/linalg.hpp"
#include "mastrack/signals.hpp"

namespace mastrack {

using linalg::Vector;

/// Controller and observer gains. In second order `l` is also the gain of
/// the own-velocity observer.
struct Gains {
  double k = 0.5;
  double l = 1.0;
  std::vector<double> tau;  // adaptive-gain rates, one per follower

  friend bool operator==(const Gains&, const Gains&) = default;
};

/// Throws ValidationError unless all gains are strictly positive and tau has n entries.
void validate(const Gains& gains, std::size_t n_followers);

/// Counts of leader-data reads per follower, for tests of the information pattern.
struct LeaderAudit {
  std::vector<std::size_t> position_reads;
  std::vector<std::size_t> input_reads;
  std::size_t violations = 0;  // reads issued for followers with b_i = 0

  explicit LeaderAudit(std::size_t n = 0) : position_reads(n, 0), input_reads(n, 0) {}
};

/// The leader's broadcast at one instant, gated per follower.
class LeaderAccess {
 public:
  LeaderAccess(const GraphMatrices& graph, double position, double input,
               LeaderAudit* audit = nullptr)
      : graph_(&graph), position_(position), input_(input), audit_(audit) {}

  /// b_i * x0, without touching x0 when b_i = 0.
  [[nodiscard]] double weighted_position(std::size_t i) const;
  /// b_i * (value - u0), without touching u0 when b_i = 0.
  [[nodiscard]] double weighted_input_residual(std::size_t i, double value) const;
  /// b_i^2 * x0.
  [[nodiscard]] double weighted2_position(std::size_t i) const;
  /// b_i * u0.
  [[nodiscard]] double weighted_input(std::size_t i) const;

 private:
  double read_position(std::size_t i) const;
  double read_input(std::size_t i) const;

  const GraphMatrices* graph_;
  double position_;
  double input_;
  LeaderAudit* audit_;
};

// ---------------------------------------------------------------------------
// Adaptive input observer (shared by both orders)

struct InputObserverRates {
  Vector du_hat0;
  Vector dd;
};

/// s_i = sum_j a_ij (uhat0_i - uhat0_j) + b_i (uhat0_i - u0)
Vector consensus_residual(std::span<const double> u_hat0, const GraphMatrices& graph,
                          const LeaderAccess& leader);

/// uhat0_i' = -s_i - d_i sgn(s_i),  d_i' = tau_i |s_i|.
InputObserverRates input_observer_rhs(std::span<const double> u_hat0, std::span<const double> d,
                                      const GraphMatrices& graph, const LeaderAccess& leader,
                                      std::span<const double> tau, Signum sgn = {});

// ---------------------------------------------------------------------------

namespace first_order {

/// Flat layout [x0 | x | u_hat0 | d | z_f0 | z_f], dimension 1 + 5N.
struct Layout {
  std::size_t n = 0;
  [[nodiscard]] std::size_t dim() const noexcept { return 1 + 5 * n; }
  [[nodiscard]] std::size_t x0() const noexcept { return 0; }
  [[nodiscard]] std::size_t x() const noexcept { return 1; }
  [[nodiscard]] std::size_t u_hat0() const noexcept { return 1 + n; }
  [[nodiscard]] std::size_t d() const noexcept { return 1 + 2 * n; }
  [[nodiscard]] std::size_t z_f0() const noexcept { return 1 + 3 * n; }
  [[nodiscard]] std::size_t z_f() const noexcept { return 1 + 4 * n; }
};

/// Read-only view over a flat state vector.
struct State {
  double x0 = 0.0;
  std::span<const double> x, u_hat0, d, z_f0, z_f;

  static State view(std::span<const double> flat, std::size_t n);
  [[nodiscard]] std::size_t size() const noexcept { return x.size(); }
};

/// Algebraic estimates, pure functions of the state.
struct Estimates {
  Vector f_hat0;  // z_f0 + b x0
  Vector f_hat;   // z_f + l x
};

Estimates estimates(const State& s, const Gains& gains, const LeaderAccess& leader);

Vector controller(const State& s, const Gains& gains, const GraphMatrices& graph,
                  const LeaderAccess& leader);

/// z_f0_i' = -b_i fhat0_i - sum_j a_ij (fhat0_i - fhat0_j) - b_i u0,
/// which expands to -b_i z_f0_i - b_i^2 x0 - sum_j a_ij (...) - b_i u0.
Vector leader_dist_observer_rhs(const State& s, const GraphMatrices& graph, const LeaderAccess& leader);

/// z_f_i' = -l z_f_i - l^2 x_i - l u_i, so that fhat_i' = -l (fhat_i - f_i).
Vector local_dist_observer_rhs(const State& s, const Gains& gains, std::span<const double> u);

/// Full closed loop at time t; writes 1 + 5N derivatives into `dxdt`.
void closed_loop_rhs(std::span<const double> flat, const Gains& gains, const GraphMatrices& graph,
                     const ScenarioSignals& signals, double t, std::span<double> dxdt,
                     Signum sgn = {}, LeaderAudit* audit = nullptr);

/// Observer and tracking errors against the true signals at time t.
struct Errors {
  Vector e_u;   // uhat0 - u0
  Vector e_0f;  // fhat0 - f0
  Vector e_f;   // fhat - f
  Vector e;     // x - x0
};

Errors extract_errors(std::span<const double> flat, const Gains& gains, const GraphMatrices& graph,
                      const ScenarioSignals& signals, double t);

struct ErrorRates {
  Vector de_u, de_0f, de_f, de;
};

/// Error dynamics written directly in matrix form:
///   e_u'  = -H e_u - D sgn(H e_u) - u0' 1
///   e_0f' = -H e_0f - f0' 1
///   e_f'  = -l e_f - f'
///   e'    = -k H e + e_0f + e_u - e_f
ErrorRates error_oracle_rhs(const Errors& err, std::span<const double> d, const GraphMatrices& graph,
                            const Gains& gains, double du0, double df0, std::span<const double> df,
                            Signum sgn = {});

}  // namespace first_order
}  // namespace mastrack
