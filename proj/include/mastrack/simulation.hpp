#pragma once

// Runs a scenario end to end and records the trace in the export layout.
//
// First order columns:
//   t, x0, x_i, uhat0_i, d_i, fhat0_i, fhat_i, u_i,
//   err_pos_norm, err_u_norm, err_f0_norm, err_f_norm
// Second order columns:
//   t, x0, v0, x_i, v_i, uhat0_i, d_i, fhat0_i, fhat_i, vhat0_i, vhat_i, u_i,
//   err_pos_norm, err_vel_norm, err_u_norm, err_f0_norm, err_f_norm
// (i = 1..N, blocks in that order).

#include <string>
#include <vector>

#include "mastrack/scenario.hpp"

namespace mastrack {

std::vector<std::string> trace_columns(Order order, std::size_t n);

/// Norms of the estimation and tracking errors at one instant.
/// For second order `e` stacks position and velocity errors.
struct ErrorNorms {
  double e = 0.0;
  double e_u = 0.0;
  double e_0f = 0.0;
  double e_f = 0.0;
  double e_0vf = 0.0;  // second order: ||[e_0v ; e_0f]||
  double e_vf = 0.0;   // second order: ||[e_v ; e_f]||
};

/// Error norms at t = 0, from the true signals and the initial estimates.
ErrorNorms initial_error_norms(const Scenario& s);

/// Integrates the closed loop. `audit`, when given, counts every read of
/// leader data.
SimTrace run_scenario(const Scenario& s, LeaderAudit* audit = nullptr);

/// Which e_u drives the linear error blocks of the directly integrated
/// error system.
enum class OracleFeed {
  Own,         // the oracle's own e_u state
  ClosedLoop,  // uhat0 - u0 taken from the closed loop at the same stage
};

/// Twin integration: the closed loop and the error ODEs advance in lockstep
/// with the same integrator, step and stage times; the adaptive gains D of
/// the closed loop drive the oracle's e_u equation. `series` holds, per
/// recorded time, the max-abs difference of each error block.
struct OracleReport {
  std::vector<std::string> blocks;  // e_u, e_0f, e_f, e  (or e_u, e_0vf, e_vf, e)
  std::vector<double> max_diff;     // over the whole horizon, per block
  Table series;                     // t, diff_<block>...
};

OracleReport compare_with_oracle(const Scenario& s, OracleFeed feed = OracleFeed::ClosedLoop);

}  // namespace mastrack
