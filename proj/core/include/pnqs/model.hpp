#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pnqs/lattice.hpp"
#include "pnqs/rng.hpp"

namespace pnqs {

enum class Arch : std::uint8_t { frbm = 0, dbm = 1 };

// Signed fixed point with saturation; the default s{6}{3} layout (1 sign,
// 6 integer, 3 fraction bits) spans [-64, +63.875] in steps of 0.125.
struct FixedPointFormat {
  int integer_bits = 6;
  int fraction_bits = 3;

  double step() const { return 1.0 / static_cast<double>(1 << fraction_bits); }
  double max_value() const { return static_cast<double>(1 << integer_bits) - step(); }
  double min_value() const { return -static_cast<double>(1 << integer_bits); }
};

// Couplings and biases of the layered network.  Weight arrays are aligned
// with the edge lists of the Topology that produced them: vh_weights[e]
// belongs to the e-th visible-hidden edge, hd_weights likewise.
struct ModelParameters {
  Arch arch = Arch::frbm;
  std::vector<double> visible_bias;
  std::vector<double> hidden_bias;
  std::vector<double> deep_bias;   // empty for frbm
  std::vector<double> vh_weights;
  std::vector<double> hd_weights;  // empty for frbm
};

// Immutable description of one network instance: graph, layer sizes, edge
// bookkeeping and the coloring used by the sweep schedulers.  Graph edges
// are ordered visible-hidden block first, hidden-deep block second.
struct Topology {
  Arch arch = Arch::frbm;
  int L = 0;
  double k1 = 0.0;
  double k2 = 0.0;
  int n_visible = 0;
  int n_hidden = 0;
  int n_deep = 0;
  std::size_t vh_edge_count = 0;
  SparseGraph graph;
  Coloring coloring;

  int node_count() const { return graph.node_count; }
};

Topology build_topology(Arch arch, int L, double k1, double k2 = 0.0);

// Flat per-node / per-edge view consumed by the samplers.  Independent of
// layer structure so the same machinery drives arbitrary networks.
struct SamplerWeights {
  std::vector<double> node_bias;    // size node_count
  std::vector<double> edge_weight;  // aligned with graph.edges
};

SamplerWeights make_sampler_weights(const Topology& topo, const ModelParameters& params);

// Flat parameter vector layout: [visible biases | hidden biases | deep
// biases | vh weights | hd weights].  Shared by the optimizer, the
// derivative accumulators and the checkpoint format.
struct ParamLayout {
  std::size_t a_offset = 0;
  std::size_t b_offset = 0;
  std::size_t c_offset = 0;
  std::size_t vh_offset = 0;
  std::size_t hd_offset = 0;
  std::size_t total = 0;

  static ParamLayout from(const Topology& topo);
};

std::vector<double> to_flat(const ModelParameters& params);
ModelParameters from_flat(const Topology& topo, std::span<const double> flat);

// E(S, h) = -sum_i a_i s_i - sum_j b_j h_j - sum_(ij) W_ij s_i h_j.
double frbm_energy(const Topology& topo, const ModelParameters& params,
                   std::span<const std::int8_t> visible,
                   std::span<const std::int8_t> hidden);

// Adds the deep layer: ... - sum_l c_l d_l - sum_(jl) W_jl h_j d_l.
double dbm_energy(const Topology& topo, const ModelParameters& params,
                  std::span<const std::int8_t> visible,
                  std::span<const std::int8_t> hidden,
                  std::span<const std::int8_t> deep);

// Same energy written over the flat node/edge view; works for any graph.
double network_energy(const SparseGraph& graph, const SamplerWeights& weights,
                      std::span<const std::int8_t> spins);

// Effective field I_i = bias_i + sum_j W_ij sigma_j.  Flipping spin i
// changes the energy by 2 I_i sigma_i.
double local_field(const SparseGraph& graph, const SamplerWeights& weights,
                   std::span<const std::int8_t> spins, int node);

// log |Psi(S)| of the marginalized two-layer network:
// (1/2) [sum_i a_i s_i + sum_j log 2 cosh(b_j + sum_i W_ij s_i)].
double log_psi_rbm(const Topology& topo, const ModelParameters& params,
                   std::span<const std::int8_t> visible);

// Gaussian init, mean 0, sigma 0.01, deterministic per stream.
ModelParameters init_params(const Topology& topo, Xoshiro256pp rng);

// Trainable parameter count for a given architecture and mask radii.
long long param_count(Arch arch, int L, double k1, double k2 = 0.0);

// Round to the nearest representable value, ties away from zero, saturate.
double quantize_value(double x, const FixedPointFormat& fmt);
ModelParameters quantize(const ModelParameters& params, const FixedPointFormat& fmt);

}  // namespace pnqs
