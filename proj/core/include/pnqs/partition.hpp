#pragma once

#include <cstdint>
#include <vector>

#include "pnqs/lattice.hpp"
#include "pnqs/model.hpp"
#include "pnqs/rng.hpp"
#include "pnqs/sampler.hpp"

namespace pnqs {

// Node -> part assignment with the derived cut/boundary bookkeeping.
struct GraphPartition {
  int parts = 0;
  std::vector<int> part_of;                     // node -> part
  std::vector<int> cut_edge_ids;                // edges crossing parts
  std::vector<std::vector<int>> boundary_nodes; // per part, ascending ids
  double cut_fraction = 0.0;                    // cut edges / total edges

  std::size_t part_size(int p) const;
};

// Balanced P-way partition: farthest-point seeded BFS growth, then pairwise
// Kernighan-Lin swap refinement (swaps keep part sizes exact).  Deterministic
// for a given (graph, parts, seed).
GraphPartition partition_graph(const SparseGraph& graph, int parts,
                               std::uint64_t seed);

// Network sampler split across P sub-samplers that each own a part of the
// nodes.  Cross-part fields are read from per-part shadow copies of the full
// state; shadows are refreshed from the owners' spins every exchange_interval
// sweeps, so between refreshes the boundary information is stale.  With
// parts = 1 the sweep sequence is bit-identical to chromatic_sweep on a chain
// seeded from the same stream.
class ClusterSampler {
 public:
  ClusterSampler(const PbitNetwork& net, GraphPartition partition,
                 int exchange_interval, std::uint64_t seed);

  void sweep();

  const std::vector<std::int8_t>& spins() const { return spins_; }
  std::uint64_t sweep_count() const { return sweeps_; }
  int exchange_interval() const { return tau_; }
  const GraphPartition& partition() const { return part_; }
  // Spins broadcast per exchange: every owner publishes its boundary nodes.
  std::uint64_t boundary_bits_per_exchange() const;

 private:
  void exchange();

  const PbitNetwork* net_;
  GraphPartition part_;
  int tau_;
  std::uint64_t sweeps_ = 0;
  std::vector<std::int8_t> spins_;                 // owners' current values
  std::vector<std::vector<std::int8_t>> shadow_;   // per part: stale full copy
  std::vector<Xoshiro256pp> rng_;                  // per part
  // classes_[p][c]: nodes of part p in sweep color class c, ascending.
  std::vector<std::vector<std::vector<int>>> classes_;
};

struct StalenessRow {
  int tau = 0;
  double energy_per_spin = 0.0;
  double std_err = 0.0;
  double deviation = 0.0;  // |E_tau - E_sync| per spin
};

struct StalenessScanOptions {
  std::vector<int> taus = {1, 2, 5, 10, 20};
  std::size_t n_samples = 20000;
  int burn_in = 2000;
  int sweeps_per_sample = 1;
  double J = 1.0;
  double gamma_x = 3.044;
  double beta = 1.0;
  int blocking_bins = 50;
  std::uint64_t seed = 1;
};

// Energy-vs-staleness study for a trained model: a synchronous
// single-sampler baseline (reported as the tau = 0 row), then one
// partitioned run per exchange interval.  Works on the visible-marginal
// estimator, so the model must carry one hidden layer only.
std::vector<StalenessRow> staleness_energy_scan(const Topology& topo,
                                                const ModelParameters& params,
                                                int parts,
                                                const StalenessScanOptions& opt);

}  // namespace pnqs
