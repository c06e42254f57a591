#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "pnqs/errors.hpp"
#include "pnqs/lattice.hpp"
#include "pnqs/rng.hpp"

using namespace pnqs;

namespace {

// Reference distance: try all nine periodic images explicitly.
double image_distance(int L, int ra, int ca, int rb, int cb) {
  double best = 1e300;
  for (int dr = -1; dr <= 1; ++dr)
    for (int dc = -1; dc <= 1; ++dc) {
      const double dy = ra - rb + dr * L;
      const double dx = ca - cb + dc * L;
      best = std::min(best, std::sqrt(dy * dy + dx * dx));
    }
  return best;
}

// Reference mask: every ordered site pair, distance checked per image.
std::set<std::pair<int, int>> image_mask_edges(int L, double k) {
  std::set<std::pair<int, int>> edges;
  const int n = L * L;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double d = image_distance(L, a / L, a % L, b / L, b % L);
      if (d * d <= std::floor(k * k) + 1e-9) edges.insert({a, b});
    }
  return edges;
}

}  // namespace

TEST_CASE("torus distance agrees with the nine-image reference") {
  Xoshiro256pp rng(11);
  for (int L : {3, 5, 8, 10}) {
    for (int trial = 0; trial < 200; ++trial) {
      const int ra = static_cast<int>(rng.next() % static_cast<std::uint64_t>(L));
      const int ca = static_cast<int>(rng.next() % static_cast<std::uint64_t>(L));
      const int rb = static_cast<int>(rng.next() % static_cast<std::uint64_t>(L));
      const int cb = static_cast<int>(rng.next() % static_cast<std::uint64_t>(L));
      const double want = image_distance(L, ra, ca, rb, cb);
      CHECK(torus_distance(L, ra, ca, rb, cb) == doctest::Approx(want).epsilon(1e-12));
      CHECK(torus_distance_sq(L, ra, ca, rb, cb) ==
            static_cast<long long>(std::llround(want * want)));
    }
  }
}

TEST_CASE("torus distance handles specific wrapping cases") {
  CHECK(torus_distance(10, 0, 0, 0, 0) == 0.0);
  CHECK(torus_distance(10, 0, 0, 0, 9) == 1.0);  // wraps the short way
  CHECK(torus_distance(10, 9, 9, 0, 0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(torus_distance(10, 0, 0, 5, 5) == doctest::Approx(7.0710678118654755));
  CHECK(torus_distance_sq(10, 0, 0, 5, 5) == 50);
}

TEST_CASE("neighborhood sizes match the published mask cardinalities") {
  CHECK(neighborhood_size(1.0) == 5);
  CHECK(neighborhood_size(2.0) == 13);
  CHECK(neighborhood_size(3.0) == 29);
  // Fractional radius: d^2 <= floor(k^2) = 2 covers the diagonal ring.
  CHECK(neighborhood_size(1.5) == 9);
}

TEST_CASE("interlayer edges equal the brute-force image mask") {
  for (double k : {1.0, 2.0, 1.5}) {
    for (int L : {5, 7}) {
      const auto got = interlayer_edges(L, k);
      const auto want = image_mask_edges(L, k);
      REQUIRE(got.size() == want.size());
      for (const auto& e : got) CHECK(want.count(e) == 1);
      CHECK(std::is_sorted(got.begin(), got.end()));
    }
  }
}

TEST_CASE("interlayer edge count is sites times mask size") {
  for (int L : {5, 10}) {
    CHECK(interlayer_edges(L, 1.0).size() == static_cast<std::size_t>(5 * L * L));
    CHECK(interlayer_edges(L, 2.0).size() == static_cast<std::size_t>(13 * L * L));
  }
  CHECK(interlayer_edges(10, 3.0).size() == static_cast<std::size_t>(29 * 100));
}

TEST_CASE("masks that wrap onto their own image are rejected") {
  CHECK_THROWS_AS(interlayer_edges(4, 2.0), degenerate_lattice_error);
  CHECK_THROWS_AS(interlayer_edges(6, 3.0), degenerate_lattice_error);
  CHECK_NOTHROW(interlayer_edges(5, 2.0));
  CHECK_NOTHROW(interlayer_edges(7, 3.0));
}

TEST_CASE("interlayer mask graph labels layers and wires both directions") {
  const int L = 5;
  const SparseGraph g = build_interlayer_mask(L, 1.0);
  const int n = L * L;
  REQUIRE(g.node_count == 2 * n);
  for (int i = 0; i < n; ++i) {
    CHECK(g.node_layer[i] == Layer::visible);
    CHECK(g.node_layer[n + i] == Layer::hidden);
    CHECK(g.degree(i) == 5);      // every site sees its mask
    CHECK(g.degree(n + i) == 5);  // and the mask is symmetric
  }
  for (auto [a, b] : g.edges) {
    CHECK(a < n);
    CHECK(b >= n);
  }
}

TEST_CASE("finalize builds a sorted, edge-aligned adjacency") {
  SparseGraph g = build_interlayer_mask(6, 1.0);
  for (int v = 0; v < g.node_count; ++v) {
    CHECK(std::is_sorted(g.neighbors[v].begin(), g.neighbors[v].end()));
    REQUIRE(g.neighbors[v].size() == g.incident_edge[v].size());
    for (std::size_t m = 0; m < g.neighbors[v].size(); ++m) {
      const auto& e = g.edges[g.incident_edge[v][m]];
      const bool touches = (e.first == v && e.second == g.neighbors[v][m]) ||
                           (e.second == v && e.first == g.neighbors[v][m]);
      CHECK(touches);
    }
  }
}

TEST_CASE("nearest-neighbor bonds cover the torus exactly twice per site") {
  for (int L : {3, 4, 10}) {
    const auto bonds = build_tfim_bonds(L);
    const int n = L * L;
    REQUIRE(static_cast<int>(bonds.size()) == 2 * n);
    std::vector<int> degree(n, 0);
    std::set<std::pair<int, int>> unique;
    for (auto [i, j] : bonds) {
      CHECK(i != j);
      ++degree[i];
      ++degree[j];
      unique.insert({std::min(i, j), std::max(i, j)});
      // Endpoints must be unit distance apart on the torus.
      CHECK(torus_distance_sq(L, i / L, i % L, j / L, j % L) == 1);
    }
    CHECK(unique.size() == bonds.size());  // no duplicates
    for (int v = 0; v < n; ++v) CHECK(degree[v] == 4);
  }
}

TEST_CASE("two-site lattice would double-cover and is rejected") {
  CHECK_THROWS_AS(build_tfim_bonds(2), degenerate_lattice_error);
  CHECK_THROWS_AS(build_tfim_bonds(1), degenerate_lattice_error);
  CHECK_THROWS_AS(build_tfim_bonds(0), config_error);  // nonsense, not degeneracy
}

TEST_CASE("greedy coloring is proper and two-chromatic on layered masks") {
  for (double k : {1.0, 2.0}) {
    SparseGraph g = build_interlayer_mask(5, k);
    const Coloring col = greedy_color(g);
    CHECK(col.color_count == 2);
    for (auto [a, b] : g.edges) CHECK(col.color[a] != col.color[b]);
  }
}

TEST_CASE("greedy coloring stays proper on random graphs") {
  Xoshiro256pp rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    SparseGraph g;
    g.node_count = 30;
    g.node_layer.assign(30, Layer::visible);
    for (int a = 0; a < 30; ++a)
      for (int b = a + 1; b < 30; ++b)
        if (rng.uniform01() < 0.15) g.edges.push_back({a, b});
    g.finalize();
    const Coloring col = greedy_color(g);
    CHECK(col.color_count >= 2);
    for (auto [a, b] : g.edges) CHECK(col.color[a] != col.color[b]);
    for (int v = 0; v < 30; ++v) {
      CHECK(col.color[v] >= 0);
      CHECK(col.color[v] < col.color_count);
    }
  }
}

TEST_CASE("edge list export is line-per-edge") {
  SparseGraph g;
  g.node_count = 3;
  g.node_layer.assign(3, Layer::visible);
  g.edges = {{0, 1}, {1, 2}};
  g.finalize();
  std::ostringstream os;
  export_edge_list(g, os);
  CHECK(os.str() == "0 1\n1 2\n");
}
