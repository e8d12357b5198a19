#pragma once

#include <cmath>
#include <vector>

#include "mastrack/graph.hpp"
#include "mastrack/linalg.hpp"

namespace testutil {

inline mastrack::Topology five_cycle() {
  mastrack::Topology t;
  t.n_followers = 5;
  for (std::size_t i = 1; i <= 5; ++i) t.follower_edges.push_back({i, i % 5 + 1, 1.0});
  t.leader_links[1] = 1.0;
  return t;
}

// Determinant by Gaussian elimination, kept apart from the library solver.
inline double det(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  double d = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    if (a[p][c] == 0.0) return 0.0;
    if (p != c) {
      std::swap(a[p], a[c]);
      d = -d;
    }
    d *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return d;
}

// Smallest root of det(M - lambda I) in [lo, hi] by bisection; the sign
// must change exactly once on the bracket.
inline double smallest_root_by_bisection(const mastrack::linalg::Matrix& m, double lo, double hi) {
  auto f = [&](double lam) {
    std::vector<std::vector<double>> a(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) a[i][j] = m(i, j) - (i == j ? lam : 0.0);
    return det(a);
  };
  const bool lo_sign = f(lo) > 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((f(mid) > 0.0) == lo_sign) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace testutil
