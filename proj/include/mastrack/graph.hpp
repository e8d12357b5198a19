#pragma once

// Communication topology of a leader-follower network and its matrices.
//
// Followers are numbered 1..N, the leader is vertex 0. The follower graph is
// undirected and weighted; the leader pushes information to the followers in
// `leader_links` (b_i > 0), which in turn never report back.

#include <cstddef>
#include <map>
#include <stdexcept>
#include <vector>

#include "mastrack/linalg.hpp"

namespace mastrack {

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct FollowerEdge {
  std::size_t i = 0;
  std::size_t j = 0;
  double weight = 1.0;

  friend bool operator==(const FollowerEdge&, const FollowerEdge&) = default;
};

struct Topology {
  std::size_t n_followers = 0;
  std::vector<FollowerEdge> follower_edges;
  std::map<std::size_t, double> leader_links;  // follower id -> b_i

  friend bool operator==(const Topology&, const Topology&) = default;
};

/// Throws ValidationError naming the offending entry.
void validate(const Topology& topo);

/// Immutable once built. Indices are 0-based (follower i lives at row i-1).
struct GraphMatrices {
  linalg::Matrix adjacency;  // A
  linalg::Matrix laplacian;  // L
  linalg::Vector leader_weights;  // diagonal of B
  linalg::Matrix h;          // H = L + B
  linalg::Vector h_eigenvalues;  // ascending
  double lambda_min_h = 0.0;
  double lambda_max_h = 0.0;

  [[nodiscard]] std::size_t size() const noexcept { return leader_weights.size(); }
  [[nodiscard]] double a(std::size_t i, std::size_t j) const { return adjacency(i, j); }
  [[nodiscard]] double b(std::size_t i) const { return leader_weights[i]; }
  /// Follower indices (0-based) adjacent to follower i.
  [[nodiscard]] const std::vector<std::size_t>& neighbors(std::size_t i) const {
    return neighbor_lists[i];
  }

  std::vector<std::vector<std::size_t>> neighbor_lists;
};

GraphMatrices build_matrices(const Topology& topo);

/// lambda_min(H) at or below this counts as zero (leader not reachable).
inline constexpr double kReachabilityTolerance = 1e-10;

/// Breadth-first reachability over follower edges.
bool is_connected(const Topology& topo);

/// True iff every follower has a path to vertex 0 in the augmented graph.
bool is_leader_reachable(const Topology& topo);

/// Unit-weight n-cycle (path for n = 2) with the leader attached to follower 1.
Topology ring_topology(std::size_t n, double leader_weight = 1.0);

}  // namespace mastrack
