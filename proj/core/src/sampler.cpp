#include "pnqs/sampler.hpp"

#include <cmath>
#include <numeric>

#include "pnqs/errors.hpp"

namespace pnqs {

std::int8_t pbit_update(double field, double beta, Xoshiro256pp& rng) {
  const double activation = std::tanh(beta * field);
  return activation >= rng.uniform_pm1() ? std::int8_t{1} : std::int8_t{-1};
}

namespace {

std::vector<std::vector<int>> group_by_color(const Coloring& col, const SparseGraph& g,
                                             bool skip_visible) {
  std::vector<std::vector<int>> classes(col.color_count);
  for (int i = 0; i < g.node_count; ++i) {
    if (skip_visible && g.node_layer[i] == Layer::visible) continue;
    classes[col.color[i]].push_back(i);  // ascending: i runs upward
  }
  return classes;
}

}  // namespace

PbitNetwork::PbitNetwork(const SparseGraph& g, SamplerWeights w, Coloring c, double beta_in)
    : graph(&g), weights(std::move(w)), coloring(std::move(c)), beta(beta_in) {
  if (weights.node_bias.size() != static_cast<std::size_t>(g.node_count) ||
      weights.edge_weight.size() != g.edges.size())
    throw config_error("sampler weights do not match graph");
  color_classes = group_by_color(coloring, g, false);
  free_classes = group_by_color(coloring, g, true);
}

PbitNetwork::PbitNetwork(const Topology& topo, SamplerWeights w, double beta_in)
    : PbitNetwork(topo.graph, std::move(w), topo.coloring, beta_in) {}

ChainState make_chain(const PbitNetwork& net, Xoshiro256pp rng) {
  ChainState chain;
  chain.spins.resize(net.graph->node_count);
  for (auto& s : chain.spins) s = rng.uniform_pm1() < 0.0 ? -1 : 1;
  chain.rng = rng;
  return chain;
}

void update_color_class(const PbitNetwork& net, ChainState& chain,
                        std::span<const int> class_nodes,
                        std::span<const double> draws,
                        std::span<const int> visit_order) {
  for (int pos : visit_order) {
    const int node = class_nodes[pos];
    const double field = local_field(*net.graph, net.weights, chain.spins, node);
    chain.spins[node] =
        std::tanh(net.beta * field) >= draws[pos] ? std::int8_t{1} : std::int8_t{-1};
  }
}

namespace {

void sweep_classes(const PbitNetwork& net, ChainState& chain,
                   const std::vector<std::vector<int>>& classes) {
  for (const auto& nodes : classes) {
    // One draw per node, consumed in node order.  Class members are never
    // adjacent, so the visit order does not affect the result.
    for (int node : nodes) {
      const double field = local_field(*net.graph, net.weights, chain.spins, node);
      chain.spins[node] = pbit_update(field, net.beta, chain.rng);
    }
  }
  ++chain.sweep_count;
}

}  // namespace

void chromatic_sweep(const PbitNetwork& net, ChainState& chain) {
  sweep_classes(net, chain, net.color_classes);
}

void clamped_sweep(const PbitNetwork& net, ChainState& chain) {
  sweep_classes(net, chain, net.free_classes);
}

SampleBatch collect_samples(const PbitNetwork& net, ChainState& chain, int n_visible,
                            std::size_t n_samples, int burn_in, int sweeps_per_sample) {
  SampleBatch batch;
  batch.n_nodes = net.graph->node_count;
  batch.n_visible = n_visible;
  batch.data.reserve(n_samples * static_cast<std::size_t>(batch.n_nodes));
  for (int s = 0; s < burn_in; ++s) chromatic_sweep(net, chain);
  for (std::size_t rec = 0; rec < n_samples; ++rec) {
    for (int s = 0; s < sweeps_per_sample; ++s) chromatic_sweep(net, chain);
    batch.data.insert(batch.data.end(), chain.spins.begin(), chain.spins.end());
  }
  return batch;
}

SampleBatch sample_visible(const PbitNetwork& net, int n_visible, std::size_t n_samples,
                           int burn_in, int sweeps_per_sample, Xoshiro256pp rng) {
  ChainState chain = make_chain(net, rng);
  return collect_samples(net, chain, n_visible, n_samples, burn_in, sweeps_per_sample);
}

}  // namespace pnqs
