#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pnqs/model.hpp"
#include "pnqs/rng.hpp"
#include "pnqs/sampler.hpp"

using namespace pnqs;

namespace {

// Exhaustive Boltzmann distribution of a small network, indexed by the
// bitmask with bit i set <=> spin i = +1.
std::vector<double> exact_state_probs(const SparseGraph& g, const SamplerWeights& w) {
  const int n = g.node_count;
  std::vector<double> p(std::size_t{1} << n);
  std::vector<std::int8_t> s(n);
  double z = 0.0;
  for (std::size_t mask = 0; mask < p.size(); ++mask) {
    for (int i = 0; i < n; ++i) s[i] = (mask >> i) & 1 ? 1 : -1;
    p[mask] = std::exp(-network_energy(g, w, s));
    z += p[mask];
  }
  for (auto& x : p) x /= z;
  return p;
}

std::size_t state_index(std::span<const std::int8_t> s) {
  std::size_t mask = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] > 0) mask |= std::size_t{1} << i;
  return mask;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  double tv = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] - b[i]);
  return 0.5 * tv;
}

// Random bipartite network: n_v + n_h nodes, edge kept with probability
// keep, weights and biases uniform within the given scales.
std::pair<SparseGraph, SamplerWeights> random_bipartite(int n_v, int n_h, double keep,
                                                        double w_scale, double b_scale,
                                                        Xoshiro256pp& rng) {
  SparseGraph g;
  g.node_count = n_v + n_h;
  g.node_layer.assign(g.node_count, Layer::visible);
  for (int j = 0; j < n_h; ++j) g.node_layer[n_v + j] = Layer::hidden;
  for (int i = 0; i < n_v; ++i)
    for (int j = 0; j < n_h; ++j)
      if (rng.uniform01() < keep) g.edges.push_back({i, n_v + j});
  g.finalize();
  SamplerWeights w;
  w.node_bias.resize(g.node_count);
  for (auto& b : w.node_bias) b = b_scale * rng.uniform_pm1();
  w.edge_weight.resize(g.edges.size());
  for (auto& x : w.edge_weight) x = w_scale * rng.uniform_pm1();
  return {std::move(g), std::move(w)};
}

}  // namespace

TEST_CASE("p-bit update hits the sigmoidal flip probability") {
  Xoshiro256pp rng(1);
  const int n = 1000000;
  int up = 0;
  for (int i = 0; i < n; ++i)
    if (pbit_update(0.5, 1.0, rng) > 0) ++up;
  // P(+1) = (1 + tanh(0.5)) / 2
  const double want = 0.7310585786300049;
  CHECK(std::abs(static_cast<double>(up) / n - want) < 0.0022);  // 5 sigma

  int up0 = 0;
  for (int i = 0; i < n; ++i)
    if (pbit_update(0.0, 1.0, rng) > 0) ++up0;
  CHECK(std::abs(static_cast<double>(up0) / n - 0.5) < 0.0025);

  // beta scales the field: beta = 2, field = 0.25 matches beta 1, field 0.5.
  int up2 = 0;
  for (int i = 0; i < n; ++i)
    if (pbit_update(0.25, 2.0, rng) > 0) ++up2;
  CHECK(std::abs(static_cast<double>(up2) / n - want) < 0.0022);
}

TEST_CASE("strong fields saturate the update") {
  Xoshiro256pp rng(2);
  for (int i = 0; i < 1000; ++i) {
    CHECK(pbit_update(40.0, 1.0, rng) == 1);
    CHECK(pbit_update(-40.0, 1.0, rng) == -1);
  }
}

TEST_CASE("two-spin ferromagnet reaches its Boltzmann table") {
  SparseGraph g;
  g.node_count = 2;
  g.node_layer = {Layer::visible, Layer::visible};
  g.edges = {{0, 1}};
  g.finalize();
  SamplerWeights w;
  w.node_bias = {0.0, 0.0};
  w.edge_weight = {1.0};

  // E = -s0 s1, so P(state) = e^{s0 s1} / (2e + 2/e), enumerated by hand.
  const double z = 2.0 * std::exp(1.0) + 2.0 * std::exp(-1.0);
  std::vector<double> want = {std::exp(1.0) / z, std::exp(-1.0) / z,
                              std::exp(-1.0) / z, std::exp(1.0) / z};
  CHECK(want[0] + want[3] == doctest::Approx(0.8807970779778823));

  const PbitNetwork net(g, w, greedy_color(g));
  ChainState chain = make_chain(net, make_stream(3, streams::kScratch, 0));
  std::vector<double> counts(4, 0.0);
  const int n = 200000;
  for (int t = 0; t < 200; ++t) chromatic_sweep(net, chain);
  for (int t = 0; t < n; ++t) {
    chromatic_sweep(net, chain);
    counts[state_index(chain.spins)] += 1.0;
  }
  for (auto& c : counts) c /= n;
  CHECK(total_variation(counts, want) < 0.01);
}

TEST_CASE("zero parameters sample the uniform distribution") {
  Xoshiro256pp graph_rng(4);
  auto [g, w] = random_bipartite(2, 2, 0.8, 0.0, 0.0, graph_rng);
  std::fill(w.node_bias.begin(), w.node_bias.end(), 0.0);
  std::fill(w.edge_weight.begin(), w.edge_weight.end(), 0.0);
  const PbitNetwork net(g, w, greedy_color(g));
  ChainState chain = make_chain(net, make_stream(5, streams::kScratch, 0));
  std::vector<double> counts(16, 0.0);
  const int n = 200000;
  for (int t = 0; t < n; ++t) {
    chromatic_sweep(net, chain);
    counts[state_index(chain.spins)] += 1.0;
  }
  for (auto& c : counts) c /= n;
  CHECK(total_variation(counts, std::vector<double>(16, 1.0 / 16.0)) < 0.02);
}

TEST_CASE("sampled visible marginal matches exhaustive enumeration") {
  Xoshiro256pp rng(6);
  for (int instance = 0; instance < 3; ++instance) {
    auto [g, w] = random_bipartite(4, 4, 0.7, 1.0, 0.5, rng);
    const auto joint = exact_state_probs(g, w);
    std::vector<double> want(16, 0.0);
    for (std::size_t mask = 0; mask < joint.size(); ++mask)
      want[mask & 15] += joint[mask];

    const PbitNetwork net(g, w, greedy_color(g));
    const SampleBatch batch = sample_visible(
        net, 4, 150000, 500, 2, make_stream(7 + instance, streams::kScratch, 0));
    std::vector<double> got(16, 0.0);
    for (std::size_t s = 0; s < batch.size(); ++s)
      got[state_index(batch.visible(s))] += 1.0;
    for (auto& c : got) c /= static_cast<double>(batch.size());
    CHECK(total_variation(got, want) < 0.02);
  }
}

TEST_CASE("clamped sweeps sample the hidden conditional exactly") {
  Xoshiro256pp rng(8);
  auto [g, w] = random_bipartite(4, 4, 0.8, 0.9, 0.4, rng);
  const PbitNetwork net(g, w, greedy_color(g));
  ChainState chain = make_chain(net, make_stream(9, streams::kScratch, 0));
  const std::vector<std::int8_t> clamped(chain.spins.begin(), chain.spins.begin() + 4);

  const int n = 120000;
  std::vector<double> up(4, 0.0);
  for (int t = 0; t < n; ++t) {
    clamped_sweep(net, chain);
    for (int j = 0; j < 4; ++j)
      if (chain.spins[4 + j] > 0) up[j] += 1.0;
  }
  // Visible spins must never move.
  for (int i = 0; i < 4; ++i) CHECK(chain.spins[i] == clamped[i]);
  // Each hidden unit is conditionally independent given the clamp, so its
  // up-frequency is (1 + tanh(theta)) / 2 with theta its local field.
  for (int j = 0; j < 4; ++j) {
    const double theta = local_field(g, w, chain.spins, 4 + j);
    const double want = 0.5 * (1.0 + std::tanh(theta));
    const double se = std::sqrt(want * (1.0 - want) / n) + 1e-9;
    CHECK(std::abs(up[j] / n - want) < 5.0 * se + 0.001);
  }
}

TEST_CASE("visit order within a color class does not matter") {
  Xoshiro256pp rng(10);
  auto [g, w] = random_bipartite(5, 5, 0.6, 1.0, 0.5, rng);
  const Coloring col = greedy_color(g);
  const PbitNetwork net(g, w, col);

  ChainState a = make_chain(net, make_stream(11, streams::kScratch, 0));
  ChainState b = a;

  const auto& nodes = net.color_classes[0];
  std::vector<double> draws(nodes.size());
  for (auto& d : draws) d = rng.uniform_pm1();

  std::vector<int> forward(nodes.size()), backward(nodes.size());
  std::iota(forward.begin(), forward.end(), 0);
  std::iota(backward.begin(), backward.end(), 0);
  std::reverse(backward.begin(), backward.end());

  update_color_class(net, a, nodes, draws, forward);
  update_color_class(net, b, nodes, draws, backward);
  CHECK(a.spins == b.spins);
}

TEST_CASE("sampling is reproducible per seed and differs across streams") {
  Xoshiro256pp rng(12);
  auto [g, w] = random_bipartite(4, 4, 0.7, 0.8, 0.3, rng);
  const PbitNetwork net(g, w, greedy_color(g));
  const SampleBatch one =
      sample_visible(net, 4, 200, 50, 1, make_stream(13, streams::kScratch, 0));
  const SampleBatch two =
      sample_visible(net, 4, 200, 50, 1, make_stream(13, streams::kScratch, 0));
  const SampleBatch other =
      sample_visible(net, 4, 200, 50, 1, make_stream(13, streams::kScratch, 1));
  CHECK(one.data == two.data);
  CHECK(one.data != other.data);
}

TEST_CASE("sweep counters track the schedule") {
  const Topology topo = build_topology(Arch::dbm, 3, 1.0, 1.0);
  const ModelParameters p = init_params(topo, make_stream(14, streams::kParamInit, 0));
  const PbitNetwork net(topo, make_sampler_weights(topo, p));
  ChainState chain = make_chain(net, make_stream(14, streams::kOuterChain, 0));
  CHECK(chain.sweep_count == 0);
  chromatic_sweep(net, chain);
  clamped_sweep(net, chain);
  CHECK(chain.sweep_count == 2);
  CHECK(net.free_classes.size() == net.color_classes.size());
  std::size_t free_nodes = 0, all_nodes = 0;
  for (const auto& c : net.free_classes) free_nodes += c.size();
  for (const auto& c : net.color_classes) all_nodes += c.size();
  CHECK(all_nodes == static_cast<std::size_t>(topo.node_count()));
  CHECK(free_nodes == static_cast<std::size_t>(topo.n_hidden + topo.n_deep));
}

TEST_CASE("recorded batches keep full states for warm starts") {
  const Topology topo = build_topology(Arch::dbm, 3, 1.0, 1.0);
  const ModelParameters p = init_params(topo, make_stream(15, streams::kParamInit, 0));
  const PbitNetwork net(topo, make_sampler_weights(topo, p));
  const SampleBatch batch = sample_visible(net, topo.n_visible, 10, 5, 1,
                                           make_stream(15, streams::kScratch, 0));
  CHECK(batch.size() == 10);
  CHECK(batch.n_nodes == topo.node_count());
  CHECK(batch.full(0).size() == static_cast<std::size_t>(topo.node_count()));
  CHECK(batch.visible(0).size() == static_cast<std::size_t>(topo.n_visible));
}
