#include "pnqs/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pnqs/errors.hpp"

namespace pnqs {

namespace {

// log(2 cosh x) without overflow for large |x|.
double log2cosh(double x) {
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax));
}

}  // namespace

Topology build_topology(Arch arch, int L, double k1, double k2) {
  if (k1 <= 0.0 || (arch == Arch::dbm && k2 <= 0.0))
    throw config_error("mask radius must be positive");
  Topology topo;
  topo.arch = arch;
  topo.L = L;
  topo.k1 = k1;
  topo.k2 = (arch == Arch::dbm) ? k2 : 0.0;

  const auto vh = interlayer_edges(L, k1);
  const int n = L * L;
  topo.n_visible = n;
  topo.n_hidden = n;
  topo.n_deep = (arch == Arch::dbm) ? n : 0;
  topo.vh_edge_count = vh.size();

  SparseGraph& g = topo.graph;
  g.node_count = n * (arch == Arch::dbm ? 3 : 2);
  g.node_layer.assign(static_cast<std::size_t>(g.node_count), Layer::visible);
  for (int j = 0; j < n; ++j) g.node_layer[n + j] = Layer::hidden;
  g.edges.reserve(vh.size());
  for (auto [a, b] : vh) g.edges.emplace_back(a, n + b);
  if (arch == Arch::dbm) {
    for (int l = 0; l < n; ++l) g.node_layer[2 * n + l] = Layer::deep;
    for (auto [a, b] : interlayer_edges(L, k2)) g.edges.emplace_back(n + a, 2 * n + b);
  }
  g.finalize();
  topo.coloring = greedy_color(g);
  return topo;
}

SamplerWeights make_sampler_weights(const Topology& topo, const ModelParameters& params) {
  SamplerWeights w;
  w.node_bias.reserve(static_cast<std::size_t>(topo.node_count()));
  w.node_bias.insert(w.node_bias.end(), params.visible_bias.begin(), params.visible_bias.end());
  w.node_bias.insert(w.node_bias.end(), params.hidden_bias.begin(), params.hidden_bias.end());
  w.node_bias.insert(w.node_bias.end(), params.deep_bias.begin(), params.deep_bias.end());
  w.edge_weight.reserve(topo.graph.edges.size());
  w.edge_weight.insert(w.edge_weight.end(), params.vh_weights.begin(), params.vh_weights.end());
  w.edge_weight.insert(w.edge_weight.end(), params.hd_weights.begin(), params.hd_weights.end());
  if (w.node_bias.size() != static_cast<std::size_t>(topo.node_count()) ||
      w.edge_weight.size() != topo.graph.edges.size())
    throw config_error("parameter arrays do not match topology");
  return w;
}

ParamLayout ParamLayout::from(const Topology& topo) {
  ParamLayout lay;
  lay.a_offset = 0;
  lay.b_offset = lay.a_offset + static_cast<std::size_t>(topo.n_visible);
  lay.c_offset = lay.b_offset + static_cast<std::size_t>(topo.n_hidden);
  lay.vh_offset = lay.c_offset + static_cast<std::size_t>(topo.n_deep);
  lay.hd_offset = lay.vh_offset + topo.vh_edge_count;
  lay.total = lay.hd_offset + (topo.graph.edges.size() - topo.vh_edge_count);
  return lay;
}

std::vector<double> to_flat(const ModelParameters& params) {
  std::vector<double> flat;
  flat.reserve(params.visible_bias.size() + params.hidden_bias.size() +
               params.deep_bias.size() + params.vh_weights.size() + params.hd_weights.size());
  for (const auto* arr : {&params.visible_bias, &params.hidden_bias, &params.deep_bias,
                          &params.vh_weights, &params.hd_weights})
    flat.insert(flat.end(), arr->begin(), arr->end());
  return flat;
}

ModelParameters from_flat(const Topology& topo, std::span<const double> flat) {
  const ParamLayout lay = ParamLayout::from(topo);
  if (flat.size() != lay.total)
    throw config_error("flat parameter vector has size " + std::to_string(flat.size()) +
                       ", topology wants " + std::to_string(lay.total));
  ModelParameters p;
  p.arch = topo.arch;
  auto slice = [&](std::size_t off, std::size_t count) {
    return std::vector<double>(flat.begin() + off, flat.begin() + off + count);
  };
  p.visible_bias = slice(lay.a_offset, topo.n_visible);
  p.hidden_bias = slice(lay.b_offset, topo.n_hidden);
  p.deep_bias = slice(lay.c_offset, topo.n_deep);
  p.vh_weights = slice(lay.vh_offset, topo.vh_edge_count);
  p.hd_weights = slice(lay.hd_offset, lay.total - lay.hd_offset);
  return p;
}

double frbm_energy(const Topology& topo, const ModelParameters& params,
                   std::span<const std::int8_t> visible,
                   std::span<const std::int8_t> hidden) {
  double e = 0.0;
  for (int i = 0; i < topo.n_visible; ++i) e -= params.visible_bias[i] * visible[i];
  for (int j = 0; j < topo.n_hidden; ++j) e -= params.hidden_bias[j] * hidden[j];
  for (std::size_t m = 0; m < topo.vh_edge_count; ++m) {
    auto [i, j] = topo.graph.edges[m];
    e -= params.vh_weights[m] * visible[i] * hidden[j - topo.n_visible];
  }
  return e;
}

double dbm_energy(const Topology& topo, const ModelParameters& params,
                  std::span<const std::int8_t> visible,
                  std::span<const std::int8_t> hidden,
                  std::span<const std::int8_t> deep) {
  double e = frbm_energy(topo, params, visible, hidden);
  const int n = topo.n_visible;
  for (int l = 0; l < topo.n_deep; ++l) e -= params.deep_bias[l] * deep[l];
  for (std::size_t m = topo.vh_edge_count; m < topo.graph.edges.size(); ++m) {
    auto [j, l] = topo.graph.edges[m];
    e -= params.hd_weights[m - topo.vh_edge_count] * hidden[j - n] * deep[l - 2 * n];
  }
  return e;
}

double network_energy(const SparseGraph& graph, const SamplerWeights& weights,
                      std::span<const std::int8_t> spins) {
  double e = 0.0;
  for (int i = 0; i < graph.node_count; ++i) e -= weights.node_bias[i] * spins[i];
  for (std::size_t m = 0; m < graph.edges.size(); ++m) {
    auto [i, j] = graph.edges[m];
    e -= weights.edge_weight[m] * spins[i] * spins[j];
  }
  return e;
}

double local_field(const SparseGraph& graph, const SamplerWeights& weights,
                   std::span<const std::int8_t> spins, int node) {
  double field = weights.node_bias[node];
  const auto& nbr = graph.neighbors[node];
  const auto& inc = graph.incident_edge[node];
  for (std::size_t m = 0; m < nbr.size(); ++m)
    field += weights.edge_weight[inc[m]] * spins[nbr[m]];
  return field;
}

double log_psi_rbm(const Topology& topo, const ModelParameters& params,
                   std::span<const std::int8_t> visible) {
  double acc = 0.0;
  for (int i = 0; i < topo.n_visible; ++i) acc += params.visible_bias[i] * visible[i];
  // Hidden pre-activations via the adjacency of each hidden node.
  for (int j = 0; j < topo.n_hidden; ++j) {
    const int node = topo.n_visible + j;
    double theta = params.hidden_bias[j];
    const auto& nbr = topo.graph.neighbors[node];
    const auto& inc = topo.graph.incident_edge[node];
    for (std::size_t m = 0; m < nbr.size(); ++m)
      theta += params.vh_weights[inc[m]] * visible[nbr[m]];
    acc += log2cosh(theta);
  }
  return 0.5 * acc;
}

ModelParameters init_params(const Topology& topo, Xoshiro256pp rng) {
  constexpr double kSigma = 0.01;
  ModelParameters p;
  p.arch = topo.arch;
  auto fill = [&](std::vector<double>& arr, std::size_t count) {
    arr.resize(count);
    for (auto& x : arr) x = kSigma * rng.normal();
  };
  fill(p.visible_bias, topo.n_visible);
  fill(p.hidden_bias, topo.n_hidden);
  fill(p.deep_bias, topo.n_deep);
  fill(p.vh_weights, topo.vh_edge_count);
  fill(p.hd_weights, topo.graph.edges.size() - topo.vh_edge_count);
  return p;
}

long long param_count(Arch arch, int L, double k1, double k2) {
  const long long n = static_cast<long long>(L) * L;
  // Validate radii against the torus exactly as the builders do.
  const long long deg1 = static_cast<long long>(interlayer_edges(L, k1).size()) / n;
  if (arch == Arch::frbm) return 2 * n + deg1 * n;
  const long long deg2 = static_cast<long long>(interlayer_edges(L, k2).size()) / n;
  return 3 * n + deg1 * n + deg2 * n;
}

double quantize_value(double x, const FixedPointFormat& fmt) {
  const double scaled = std::round(x * static_cast<double>(1 << fmt.fraction_bits));
  const double q = scaled * fmt.step();
  return std::clamp(q, fmt.min_value(), fmt.max_value());
}

ModelParameters quantize(const ModelParameters& params, const FixedPointFormat& fmt) {
  ModelParameters q = params;
  for (auto* arr : {&q.visible_bias, &q.hidden_bias, &q.deep_bias, &q.vh_weights, &q.hd_weights})
    for (auto& x : *arr) x = quantize_value(x, fmt);
  return q;
}

}  // namespace pnqs
