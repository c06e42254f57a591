#include "pnqs/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "pnqs/errors.hpp"

namespace pnqs {

namespace {

int wrap(int x, int L) {
  int r = x % L;
  return r < 0 ? r + L : r;
}

// |a - b| folded to the shorter way around the ring.
int ring_gap(int a, int b, int L) {
  int d = std::abs(wrap(a, L) - wrap(b, L));
  return std::min(d, L - d);
}

void check_lattice_size(int L) {
  if (L < 1) throw config_error("lattice size L must be positive, got " + std::to_string(L));
}

// Offsets (dr, dc) with dr^2 + dc^2 <= floor(k^2), fixed scan order.
std::vector<std::pair<int, int>> mask_offsets(double k) {
  if (k < 0.0 || !std::isfinite(k))
    throw config_error("mask radius k must be finite and >= 0");
  const long long k2 = static_cast<long long>(std::floor(k * k));
  const int reach = static_cast<int>(std::floor(k));
  std::vector<std::pair<int, int>> offsets;
  for (int dr = -reach; dr <= reach; ++dr)
    for (int dc = -reach; dc <= reach; ++dc)
      if (static_cast<long long>(dr) * dr + static_cast<long long>(dc) * dc <= k2)
        offsets.emplace_back(dr, dc);
  return offsets;
}

}  // namespace

void SparseGraph::finalize() {
  neighbors.assign(node_count, {});
  incident_edge.assign(node_count, {});
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto [i, j] = edges[e];
    neighbors[i].push_back(j);
    incident_edge[i].push_back(static_cast<int>(e));
    neighbors[j].push_back(i);
    incident_edge[j].push_back(static_cast<int>(e));
  }
  // Sort each adjacency list by neighbor id, keeping edge ids aligned.
  for (int i = 0; i < node_count; ++i) {
    const auto& nbr = neighbors[i];
    std::vector<int> order(nbr.size());
    for (std::size_t m = 0; m < order.size(); ++m) order[m] = static_cast<int>(m);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return nbr[a] < nbr[b]; });
    std::vector<int> snbr(nbr.size());
    std::vector<int> sedge(nbr.size());
    for (std::size_t m = 0; m < order.size(); ++m) {
      snbr[m] = neighbors[i][order[m]];
      sedge[m] = incident_edge[i][order[m]];
    }
    neighbors[i] = std::move(snbr);
    incident_edge[i] = std::move(sedge);
  }
}

long long torus_distance_sq(int L, int row_a, int col_a, int row_b, int col_b) {
  check_lattice_size(L);
  const long long dr = ring_gap(row_a, row_b, L);
  const long long dc = ring_gap(col_a, col_b, L);
  return dr * dr + dc * dc;
}

double torus_distance(int L, int row_a, int col_a, int row_b, int col_b) {
  return std::sqrt(static_cast<double>(torus_distance_sq(L, row_a, col_a, row_b, col_b)));
}

int neighborhood_size(double k) {
  return static_cast<int>(mask_offsets(k).size());
}

std::vector<std::pair<int, int>> interlayer_edges(int L, double k) {
  check_lattice_size(L);
  const auto offsets = mask_offsets(k);
  if (2.0 * k >= static_cast<double>(L))
    throw degenerate_lattice_error(
        "mask radius k = " + std::to_string(k) + " reaches around the torus for L = " +
        std::to_string(L) + " (need k < L/2)");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(L) * L * offsets.size());
  for (int r = 0; r < L; ++r)
    for (int c = 0; c < L; ++c) {
      const int a = r * L + c;
      for (auto [dr, dc] : offsets) {
        const int b = wrap(r + dr, L) * L + wrap(c + dc, L);
        edges.emplace_back(a, b);
      }
    }
  // Canonical order: by source-layer site, then target-layer site.
  std::sort(edges.begin(), edges.end());
  return edges;
}

SparseGraph build_interlayer_mask(int L, double k) {
  const int n = L * L;
  SparseGraph g;
  g.node_count = 2 * n;
  g.node_layer.assign(static_cast<std::size_t>(2 * n), Layer::visible);
  for (int i = n; i < 2 * n; ++i) g.node_layer[i] = Layer::hidden;
  for (auto [a, b] : interlayer_edges(L, k)) g.edges.emplace_back(a, n + b);
  g.finalize();
  return g;
}

std::vector<std::pair<int, int>> build_tfim_bonds(int L) {
  check_lattice_size(L);
  if (L < 3)
    throw degenerate_lattice_error(
        "periodic bonds need L >= 3, got L = " + std::to_string(L) +
        " (wrap-around duplicates every bond)");
  std::vector<std::pair<int, int>> bonds;
  bonds.reserve(static_cast<std::size_t>(2) * L * L);
  for (int r = 0; r < L; ++r)
    for (int c = 0; c < L; ++c) {
      const int i = r * L + c;
      bonds.emplace_back(i, r * L + wrap(c + 1, L));
      bonds.emplace_back(i, wrap(r + 1, L) * L + c);
    }
  return bonds;
}

Coloring greedy_color(const SparseGraph& graph) {
  Coloring col;
  col.color.assign(graph.node_count, -1);
  for (int i = 0; i < graph.node_count; ++i) {
    // Smallest color unused among already-colored neighbors.
    std::vector<bool> taken(graph.degree(i) + 1, false);
    for (int nbr : graph.neighbors[i]) {
      int c = col.color[nbr];
      if (c >= 0 && c < static_cast<int>(taken.size())) taken[c] = true;
    }
    int c = 0;
    while (taken[c]) ++c;
    col.color[i] = c;
    col.color_count = std::max(col.color_count, c + 1);
  }
  return col;
}

void export_edge_list(const SparseGraph& graph, std::ostream& out) {
  for (auto [i, j] : graph.edges) out << i << ' ' << j << '\n';
}

}  // namespace pnqs
