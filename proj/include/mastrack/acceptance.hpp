#pragma once

// Acceptance suite shared by `mastrack verify` and the acceptance test.
//
// Criteria:
//   1 second-order fixture within its certified bounds
//   2 first-order fixture within its certified bounds and observer sub-bounds
//   3 input observer convergence and adaptive gain behavior
//   4 zero tracking error under constant signals
//   5 closed-loop errors vs directly integrated error dynamics
//   6 Lyapunov solver residuals, quadrature agreement, Q1 spectrum
//   7 graph spectra vs brute-force reachability and connectivity
//   8 determinism and step robustness

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mastrack/linalg.hpp"
#include "mastrack/graph.hpp"

namespace mastrack {

enum class Suite { First, Second, All };

/// Throws ValidationError for anything but first / second / all.
Suite suite_from_string(const std::string& name);

struct AcceptanceOptions {
  Suite suite = Suite::All;
  bool fast = false;  // fewer random instances for criteria 6 and 7
  std::uint64_t seed = 20240611;
};

struct Check {
  std::string name;
  double observed = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  std::string error;  // set when the criterion threw before finishing

  [[nodiscard]] bool pass() const;
};

inline constexpr double kSettleTime = 50.0;

/// Criteria selected by the suite, in id order. Independent criteria run
/// concurrently; the result does not depend on scheduling.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

/// "criterion 3 PASS input observer convergence (3/3 checks)", failing
/// checks appended as "; name observed > bound".
std::string summary_line(const CriterionResult& r);
/// "  eu_after_settle  observed 0.0103  bound 0.05  PASS"
std::string check_line(const Check& c);

// Independent oracles.

/// exp(A) by scaling and squaring of a Taylor series.
linalg::Matrix expm(const linalg::Matrix& a);

/// P = integral of exp(Q^T t) exp(Q t) over [0, inf): Gauss-Legendre on a
/// short interval, then interval doubling P(2T) = P(T) + E^T P(T) E.
linalg::Matrix lyapunov_by_quadrature(const linalg::Matrix& q);

/// Transitive closure (Floyd-Warshall) of the leader-augmented graph.
bool reachable_by_closure(const Topology& topo);

/// Transitive closure of the follower graph alone.
bool connected_by_closure(const Topology& topo);

}  // namespace mastrack
