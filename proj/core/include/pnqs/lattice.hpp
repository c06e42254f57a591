#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

namespace pnqs {

// Node roles in the layered network.  Visible spins live on the physical
// lattice; hidden and deep units live on copies of the same L x L geometry.
enum class Layer : std::uint8_t { visible = 0, hidden = 1, deep = 2 };

// Undirected graph with layer labels.  Edges are stored once as (i, j) with
// i < j; edge ids index auxiliary per-edge arrays (couplings, cut flags).
struct SparseGraph {
  int node_count = 0;
  std::vector<Layer> node_layer;
  std::vector<std::pair<int, int>> edges;

  // Adjacency built by finalize(): neighbors[i][m] is the m-th neighbor of
  // node i and incident_edge[i][m] the id of the connecting edge.
  std::vector<std::vector<int>> neighbors;
  std::vector<std::vector<int>> incident_edge;

  void finalize();
  int degree(int node) const { return static_cast<int>(neighbors[node].size()); }
};

struct Coloring {
  std::vector<int> color;
  int color_count = 0;
};

// Minimum-image Euclidean distance between two sites of a periodic L x L
// lattice.  Coordinates may be arbitrary integers; they are wrapped mod L.
double torus_distance(int L, int row_a, int col_a, int row_b, int col_b);

// Squared minimum-image distance in exact integer arithmetic.
long long torus_distance_sq(int L, int row_a, int col_a, int row_b, int col_b);

// Number of sites within Euclidean distance k of a fixed site, counting the
// site itself: 5 for k = 1, 13 for k = 2, 29 for k = 3.
int neighborhood_size(double k);

// Edges between two L x L layers: local site a in one layer connects to
// local site b in the other iff their torus distance is <= k.  Membership is
// decided as d^2 <= floor(k^2) in integer arithmetic, so boundary sites can
// never flip on floating-point rounding.  Rejects k >= L/2, where the mask
// would wrap onto its own periodic image.
std::vector<std::pair<int, int>> interlayer_edges(int L, double k);

// interlayer_edges packaged as a graph: nodes [0, N) are the visible layer,
// [N, 2N) the hidden layer.
SparseGraph build_interlayer_mask(int L, double k);

// Nearest-neighbor bonds of the periodic L x L lattice, 2 N bonds total.
// L = 2 is rejected: right and down wrap onto the same pair and the bond
// list would double-cover the lattice.
std::vector<std::pair<int, int>> build_tfim_bonds(int L);

// First-fit coloring in node-index order.  For the layered (bipartite)
// networks this yields exactly two colors; any proper coloring is accepted
// by the samplers.
Coloring greedy_color(const SparseGraph& graph);

// Plain-text edge list, one "i j" pair per line.
void export_edge_list(const SparseGraph& graph, std::ostream& out);

}  // namespace pnqs
