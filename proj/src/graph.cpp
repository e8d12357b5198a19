#include "mastrack/graph.hpp"

#include <cmath>
#include <queue>
#include <set>
#include <sstream>
#include <utility>

namespace mastrack {

void validate(const Topology& topo) {
  if (topo.n_followers == 0) throw ValidationError("n_followers must be positive");
  const auto n = topo.n_followers;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t e = 0; e < topo.follower_edges.size(); ++e) {
    const auto& edge = topo.follower_edges[e];
    std::ostringstream where;
    where << "topology: edge #" << e << " (" << edge.i << "," << edge.j << ")";
    if (edge.i < 1 || edge.i > n || edge.j < 1 || edge.j > n)
      throw ValidationError(where.str() + ": follower id out of range 1.." + std::to_string(n));
    if (edge.i == edge.j) throw ValidationError(where.str() + ": self-edge");
    if (!(edge.weight > 0.0) || !std::isfinite(edge.weight))
      throw ValidationError(where.str() + ": weight must be positive");
    const auto key = std::minmax(edge.i, edge.j);
    if (!seen.insert(key).second) throw ValidationError(where.str() + ": duplicate edge");
  }
  for (const auto& [id, w] : topo.leader_links) {
    std::ostringstream where;
    where << "topology: leader link to follower " << id;
    if (id < 1 || id > n)
      throw ValidationError(where.str() + ": follower id out of range 1.." + std::to_string(n));
    if (!(w > 0.0) || !std::isfinite(w))
      throw ValidationError(where.str() + ": weight must be positive");
  }
}

GraphMatrices build_matrices(const Topology& topo) {
  validate(topo);
  const auto n = topo.n_followers;
  GraphMatrices g;
  g.adjacency = linalg::Matrix(n, n);
  g.neighbor_lists.assign(n, {});
  for (const auto& e : topo.follower_edges) {
    g.adjacency(e.i - 1, e.j - 1) = e.weight;
    g.adjacency(e.j - 1, e.i - 1) = e.weight;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (g.adjacency(i, j) > 0.0) g.neighbor_lists[i].push_back(j);

  g.laplacian = linalg::Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double degree = 0.0;
    for (std::size_t j : g.neighbor_lists[i]) {
      g.laplacian(i, j) = -g.adjacency(i, j);
      degree += g.adjacency(i, j);
    }
    g.laplacian(i, i) = degree;
  }

  g.leader_weights.assign(n, 0.0);
  for (const auto& [id, w] : topo.leader_links) g.leader_weights[id - 1] = w;

  g.h = g.laplacian;
  for (std::size_t i = 0; i < n; ++i) g.h(i, i) += g.leader_weights[i];

  g.h_eigenvalues = linalg::symmetric_eigenvalues(g.h);
  g.lambda_min_h = g.h_eigenvalues.front();
  g.lambda_max_h = g.h_eigenvalues.back();
  return g;
}

namespace {

std::vector<std::vector<std::size_t>> adjacency_lists(const Topology& topo) {
  std::vector<std::vector<std::size_t>> adj(topo.n_followers);
  for (const auto& e : topo.follower_edges) {
    adj[e.i - 1].push_back(e.j - 1);
    adj[e.j - 1].push_back(e.i - 1);
  }
  return adj;
}

std::vector<bool> reach_from(const std::vector<std::vector<std::size_t>>& adj,
                             const std::vector<std::size_t>& seeds) {
  std::vector<bool> seen(adj.size(), false);
  std::queue<std::size_t> frontier;
  for (auto s : seeds) {
    if (!seen[s]) {
      seen[s] = true;
      frontier.push(s);
    }
  }
  while (!frontier.empty()) {
    const auto v = frontier.front();
    frontier.pop();
    for (auto w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        frontier.push(w);
      }
    }
  }
  return seen;
}

}  // namespace

bool is_connected(const Topology& topo) {
  validate(topo);
  const auto seen = reach_from(adjacency_lists(topo), {0});
  for (bool s : seen)
    if (!s) return false;
  return true;
}

bool is_leader_reachable(const Topology& topo) {
  validate(topo);
  std::vector<std::size_t> seeds;
  for (const auto& [id, w] : topo.leader_links) seeds.push_back(id - 1);
  if (seeds.empty()) return false;
  const auto seen = reach_from(adjacency_lists(topo), seeds);
  for (bool s : seen)
    if (!s) return false;
  return true;
}

Topology ring_topology(std::size_t n, double leader_weight) {
  Topology t;
  t.n_followers = n;
  for (std::size_t i = 1; i < n; ++i) t.follower_edges.push_back({i, i + 1, 1.0});
  if (n > 2) t.follower_edges.push_back({1, n, 1.0});
  t.leader_links[1] = leader_weight;
  return t;
}

}  // namespace mastrack
