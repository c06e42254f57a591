#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pnqs/model.hpp"
#include "pnqs/rng.hpp"

namespace pnqs {

// One stochastic unit update.  Draws exactly one uniform from [-1, 1) and
// returns sign(tanh(beta * field) - r): +1 with probability
// (1 + tanh(beta * field)) / 2, the Boltzmann conditional of a +-1 spin.
std::int8_t pbit_update(double field, double beta, Xoshiro256pp& rng);

// Everything a sweep needs to know about the network, precomputed once.
// The graph reference must outlive the network view.
struct PbitNetwork {
  const SparseGraph* graph = nullptr;
  SamplerWeights weights;
  Coloring coloring;
  double beta = 1.0;

  // Nodes grouped by color, ascending node id within each class; the same
  // grouping restricted to non-visible nodes drives clamped sweeps.
  std::vector<std::vector<int>> color_classes;
  std::vector<std::vector<int>> free_classes;

  PbitNetwork() = default;
  PbitNetwork(const SparseGraph& g, SamplerWeights w, Coloring c, double beta_in = 1.0);
  PbitNetwork(const Topology& topo, SamplerWeights w, double beta_in = 1.0);
};

// Mutable state of one Markov chain: spin configuration plus its private
// RNG stream.  Copyable, so clamped chains can fork from a recorded state.
struct ChainState {
  std::vector<std::int8_t> spins;
  Xoshiro256pp rng;
  std::uint64_t sweep_count = 0;
};

// Fresh chain with uniformly random spins drawn from the stream.
ChainState make_chain(const PbitNetwork& net, Xoshiro256pp rng);

// Updates the nodes of one color class.  draws[m] is the comparator noise
// assigned to class_nodes[m]; visit_order permutes the update sequence.
// Within a properly colored class no two nodes are adjacent, so any visit
// order yields the same configuration as long as the draw assignment is
// kept. The scheduler exercises identity order; tests exercise the rest.
void update_color_class(const PbitNetwork& net, ChainState& chain,
                        std::span<const int> class_nodes,
                        std::span<const double> draws,
                        std::span<const int> visit_order);

// One full chromatic sweep: color classes in ascending order, nodes in
// ascending id within each class, one RNG draw per node in that order.
void chromatic_sweep(const PbitNetwork& net, ChainState& chain);

// Same schedule but visible spins stay clamped; samples the conditional
// distribution of the auxiliary layers.
void clamped_sweep(const PbitNetwork& net, ChainState& chain);

// Batch of recorded configurations.  Full states are kept so clamped
// chains can warm-start from the auxiliary layers of the recording.
struct SampleBatch {
  int n_nodes = 0;
  int n_visible = 0;
  std::vector<std::int8_t> data;  // size() * n_nodes, row per sample

  std::size_t size() const {
    return n_nodes == 0 ? 0 : data.size() / static_cast<std::size_t>(n_nodes);
  }
  std::span<const std::int8_t> full(std::size_t s) const {
    return {data.data() + s * static_cast<std::size_t>(n_nodes),
            static_cast<std::size_t>(n_nodes)};
  }
  std::span<const std::int8_t> visible(std::size_t s) const {
    return full(s).subspan(0, static_cast<std::size_t>(n_visible));
  }
};

// Runs burn_in sweeps on the chain, then records size samples taking
// sweeps_per_sample sweeps between recordings.
SampleBatch collect_samples(const PbitNetwork& net, ChainState& chain, int n_visible,
                            std::size_t n_samples, int burn_in, int sweeps_per_sample);

// Free-running sampler started from a fresh random chain.
SampleBatch sample_visible(const PbitNetwork& net, int n_visible, std::size_t n_samples,
                           int burn_in, int sweeps_per_sample, Xoshiro256pp rng);

}  // namespace pnqs
