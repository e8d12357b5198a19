#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "mastrack/graph.hpp"

using namespace mastrack;
using linalg::Matrix;

TEST_SUITE("graph") {
  TEST_CASE("five-cycle Laplacian and leader matrix") {
    const GraphMatrices g = build_matrices(testutil::five_cycle());
    const Matrix l{{2, -1, 0, 0, -1}, {-1, 2, -1, 0, 0}, {0, -1, 2, -1, 0}, {0, 0, -1, 2, -1}, {-1, 0, 0, -1, 2}};
    CHECK(g.laplacian == l);
    CHECK(g.leader_weights == std::vector<double>{1, 0, 0, 0, 0});
    CHECK(g.h == l + Matrix::diagonal(g.leader_weights));
    CHECK(g.neighbors(0) == std::vector<std::size_t>{1, 4});
  }

  TEST_CASE("smallest eigenvalue of H agrees with characteristic-polynomial bisection") {
    const GraphMatrices g = build_matrices(testutil::five_cycle());
    const double bisected = testutil::smallest_root_by_bisection(g.h, 0.0, 0.3);
    CHECK(bisected == doctest::Approx(0.13919415).epsilon(1e-7));
    CHECK(g.lambda_min_h == doctest::Approx(bisected).epsilon(1e-10));
    CHECK(g.h_eigenvalues.front() == g.lambda_min_h);
  }

  TEST_CASE("Laplacian rows sum to zero") {
    Topology t;
    t.n_followers = 4;
    t.follower_edges = {{1, 2, 0.25}, {2, 3, 1.5}, {1, 4, 0.125}, {3, 4, 2.75}, {1, 3, 0.5}};
    t.leader_links[2] = 0.4;
    const GraphMatrices g = build_matrices(t);
    // dyadic weights: every partial sum is exact
    for (double r : g.laplacian * std::vector<double>(4, 1.0)) CHECK(r == 0.0);
    CHECK(g.adjacency == g.adjacency.transpose());
    CHECK(g.h == g.h.transpose());

    t.follower_edges = {{1, 2, 0.3}, {2, 3, 1.7}, {1, 4, 0.1}, {3, 4, 2.9}, {1, 3, 1e-3}};
    const GraphMatrices h = build_matrices(t);
    for (std::size_t i = 0; i < 4; ++i) {
      double off = 0.0;
      for (std::size_t j = 0; j < 4; ++j)
        if (j != i) {
          CHECK(h.laplacian(i, j) == -h.adjacency(i, j));
          off += h.adjacency(i, j);
        }
      CHECK(h.laplacian(i, i) == off);
    }
    for (double r : h.laplacian * std::vector<double>(4, 1.0)) CHECK(std::abs(r) <= 1e-15);
  }

  TEST_CASE("connectivity") {
    CHECK(is_connected(testutil::five_cycle()));
    Topology pair;
    pair.n_followers = 2;
    CHECK_FALSE(is_connected(pair));
    Topology path = testutil::five_cycle();
    path.follower_edges.pop_back();
    CHECK(is_connected(path));
  }

  TEST_CASE("leader reachability") {
    CHECK(is_leader_reachable(testutil::five_cycle()));
    Topology none = testutil::five_cycle();
    none.leader_links.clear();
    CHECK_FALSE(is_leader_reachable(none));
    CHECK(build_matrices(none).lambda_min_h == doctest::Approx(0.0).scale(1.0));

    Topology split;
    split.n_followers = 4;
    split.follower_edges = {{1, 2, 1.0}, {3, 4, 1.0}};
    split.leader_links[1] = 1.0;
    CHECK_FALSE(is_leader_reachable(split));
    split.leader_links[4] = 2.0;
    CHECK(is_leader_reachable(split));
    CHECK(build_matrices(split).lambda_min_h > 1e-10);
  }

  TEST_CASE("validation names the offending entry") {
    Topology t = testutil::five_cycle();
    t.follower_edges.push_back({2, 2, 1.0});
    CHECK_THROWS_WITH_AS(validate(t), doctest::Contains("self-edge"), ValidationError);
    t = testutil::five_cycle();
    t.follower_edges.push_back({2, 1, 1.0});
    CHECK_THROWS_WITH_AS(validate(t), doctest::Contains("duplicate edge"), ValidationError);
    t = testutil::five_cycle();
    t.follower_edges[0].weight = 0.0;
    CHECK_THROWS_WITH_AS(validate(t), doctest::Contains("weight must be positive"), ValidationError);
    t = testutil::five_cycle();
    t.leader_links[9] = 1.0;
    CHECK_THROWS_WITH_AS(validate(t), doctest::Contains("out of range"), ValidationError);
  }

  TEST_CASE("ring helper") {
    CHECK(build_matrices(ring_topology(5)).h == build_matrices(testutil::five_cycle()).h);
    CHECK(ring_topology(2).follower_edges.size() == 1);
  }
}
