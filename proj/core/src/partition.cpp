#include "pnqs/partition.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <set>

#include "pnqs/errors.hpp"
#include "pnqs/estimator.hpp"
#include "pnqs/trainer.hpp"

namespace pnqs {

std::size_t GraphPartition::part_size(int p) const {
  return static_cast<std::size_t>(std::count(part_of.begin(), part_of.end(), p));
}

namespace {

// BFS hop counts from a seed set; unreachable nodes keep INT_MAX.
std::vector<int> bfs_distance(const SparseGraph& g, const std::vector<int>& seeds) {
  std::vector<int> dist(g.node_count, std::numeric_limits<int>::max());
  std::deque<int> queue;
  for (int s : seeds) {
    dist[s] = 0;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int w : g.neighbors[u])
      if (dist[w] == std::numeric_limits<int>::max()) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
  }
  return dist;
}

void refresh_cut(const SparseGraph& g, GraphPartition& part) {
  part.cut_edge_ids.clear();
  std::vector<char> on_boundary(g.node_count, 0);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    auto [i, j] = g.edges[e];
    if (part.part_of[i] != part.part_of[j]) {
      part.cut_edge_ids.push_back(static_cast<int>(e));
      on_boundary[i] = 1;
      on_boundary[j] = 1;
    }
  }
  part.boundary_nodes.assign(part.parts, {});
  for (int v = 0; v < g.node_count; ++v)
    if (on_boundary[v]) part.boundary_nodes[part.part_of[v]].push_back(v);
  part.cut_fraction = g.edges.empty()
                          ? 0.0
                          : static_cast<double>(part.cut_edge_ids.size()) /
                                static_cast<double>(g.edges.size());
}

// One Kernighan-Lin swap round on the pair (p, q).  Moving a node between p
// and q cannot change the cut status of its edges into third parts, so the
// pair subproblem is exact for the global cut.  Candidates are restricted to
// the pair boundary; swaps keep both sizes unchanged.  Returns the applied
// cut improvement (0 if the best prefix was not positive).
long long kl_pair_round(const SparseGraph& g, std::vector<int>& part_of, int p, int q) {
  std::vector<int> a_nodes, b_nodes;  // candidates in p resp. q, ascending
  for (int v = 0; v < g.node_count; ++v) {
    if (part_of[v] != p && part_of[v] != q) continue;
    const int other = part_of[v] == p ? q : p;
    bool cross = false;
    for (int w : g.neighbors[v])
      if (part_of[w] == other) {
        cross = true;
        break;
      }
    if (cross) (part_of[v] == p ? a_nodes : b_nodes).push_back(v);
  }
  if (a_nodes.empty() || b_nodes.empty()) return 0;

  std::vector<int> side(g.node_count, -1);  // 0: candidate in p, 1: in q
  for (int v : a_nodes) side[v] = 0;
  for (int v : b_nodes) side[v] = 1;

  // D[v] = cross-pair neighbors - own-side neighbors; the swap gain of
  // (a, b) is D[a] + D[b] - 2 [a adjacent to b].
  std::vector<long long> gain_d(g.node_count, 0);
  for (int v : a_nodes)
    for (int w : g.neighbors[v]) {
      if (part_of[w] == q) ++gain_d[v];
      else if (part_of[w] == p) --gain_d[v];
    }
  for (int v : b_nodes)
    for (int w : g.neighbors[v]) {
      if (part_of[w] == p) ++gain_d[v];
      else if (part_of[w] == q) --gain_d[v];
    }

  const auto adjacent = [&](int a, int b) {
    return std::binary_search(g.neighbors[a].begin(), g.neighbors[a].end(), b);
  };

  std::vector<char> locked(g.node_count, 0);
  std::vector<std::pair<int, int>> swaps;
  std::vector<long long> gains;
  const std::size_t max_steps = std::min({a_nodes.size(), b_nodes.size(),
                                          std::size_t{64}});
  for (std::size_t step = 0; step < max_steps; ++step) {
    long long best = std::numeric_limits<long long>::min();
    int best_a = -1, best_b = -1;
    for (int a : a_nodes) {
      if (locked[a]) continue;
      for (int b : b_nodes) {
        if (locked[b]) continue;
        const long long gain = gain_d[a] + gain_d[b] - (adjacent(a, b) ? 2 : 0);
        if (gain > best) {
          best = gain;
          best_a = a;
          best_b = b;
        }
      }
    }
    if (best_a < 0) break;
    locked[best_a] = 1;
    locked[best_b] = 1;
    swaps.emplace_back(best_a, best_b);
    gains.push_back(best);
    // Update D as if the swap were applied: a neighbor on the mover's old
    // side gains an external tie, one on the opposite side loses one.
    const auto bump = [&](int moved, int from_side) {
      for (int w : g.neighbors[moved]) {
        if (locked[w] || side[w] < 0) continue;
        gain_d[w] += side[w] == from_side ? 2 : -2;
      }
    };
    bump(best_a, 0);
    bump(best_b, 1);
  }

  long long cum = 0, best_cum = 0;
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < gains.size(); ++k) {
    cum += gains[k];
    if (cum > best_cum) {
      best_cum = cum;
      best_k = k + 1;
    }
  }
  for (std::size_t k = 0; k < best_k; ++k) {
    part_of[swaps[k].first] = q;
    part_of[swaps[k].second] = p;
  }
  return best_cum;
}

}  // namespace

GraphPartition partition_graph(const SparseGraph& graph, int parts, std::uint64_t seed) {
  if (parts < 1) throw config_error("partition: parts must be >= 1");
  if (parts > graph.node_count) throw config_error("partition: more parts than nodes");
  if (graph.neighbors.size() != static_cast<std::size_t>(graph.node_count))
    throw config_error("partition: graph adjacency not finalized");

  GraphPartition part;
  part.parts = parts;
  part.part_of.assign(graph.node_count, 0);
  if (parts == 1) {
    refresh_cut(graph, part);
    return part;
  }

  // Farthest-point seeding: first seed random, each further seed maximizes
  // the BFS distance to the set (unreachable counts as infinite, so every
  // component gets one; ties go to the smallest id).
  Xoshiro256pp rng(seed);
  std::vector<int> seeds{static_cast<int>(rng.next() % graph.node_count)};
  while (static_cast<int>(seeds.size()) < parts) {
    const auto dist = bfs_distance(graph, seeds);
    int best = -1;
    for (int v = 0; v < graph.node_count; ++v) {
      if (std::find(seeds.begin(), seeds.end(), v) != seeds.end()) continue;
      if (best < 0 || dist[v] > dist[best]) best = v;
    }
    seeds.push_back(best);
  }

  // Quota-bounded BFS growth, round-robin over parts.  When a frontier
  // starves (disconnected graph) the part grabs the smallest unassigned id.
  part.part_of.assign(graph.node_count, -1);
  std::vector<int> target(parts, graph.node_count / parts);
  for (int p = 0; p < graph.node_count % parts; ++p) ++target[p];
  std::vector<int> count(parts, 0);
  std::vector<std::deque<int>> frontier(parts);
  int assigned = 0;
  for (int p = 0; p < parts; ++p) {
    part.part_of[seeds[p]] = p;
    ++count[p];
    ++assigned;
    for (int w : graph.neighbors[seeds[p]]) frontier[p].push_back(w);
  }
  int cursor = 0;
  while (assigned < graph.node_count) {
    for (int p = 0; p < parts && assigned < graph.node_count; ++p) {
      if (count[p] >= target[p]) continue;
      int u = -1;
      while (!frontier[p].empty()) {
        const int v = frontier[p].front();
        frontier[p].pop_front();
        if (part.part_of[v] < 0) {
          u = v;
          break;
        }
      }
      if (u < 0) {
        while (part.part_of[cursor] >= 0) ++cursor;
        u = cursor;
      }
      part.part_of[u] = p;
      ++count[p];
      ++assigned;
      for (int w : graph.neighbors[u])
        if (part.part_of[w] < 0) frontier[p].push_back(w);
    }
  }

  // Pairwise refinement until no pair improves.
  for (int pass = 0; pass < 10; ++pass) {
    std::set<std::pair<int, int>> pairs;
    for (auto [i, j] : graph.edges) {
      const int pi = part.part_of[i], pj = part.part_of[j];
      if (pi != pj) pairs.insert({std::min(pi, pj), std::max(pi, pj)});
    }
    long long improved = 0;
    for (auto [p, q] : pairs) improved += kl_pair_round(graph, part.part_of, p, q);
    if (improved == 0) break;
  }

  refresh_cut(graph, part);
  return part;
}

ClusterSampler::ClusterSampler(const PbitNetwork& net, GraphPartition partition,
                               int exchange_interval, std::uint64_t seed)
    : net_(&net), part_(std::move(partition)), tau_(exchange_interval) {
  if (tau_ < 1) throw config_error("cluster sampler: exchange interval must be >= 1");
  const SparseGraph& g = *net.graph;
  if (part_.part_of.size() != static_cast<std::size_t>(g.node_count))
    throw config_error("cluster sampler: partition does not match network");

  classes_.assign(part_.parts,
                  std::vector<std::vector<int>>(net.color_classes.size()));
  for (std::size_t c = 0; c < net.color_classes.size(); ++c)
    for (int node : net.color_classes[c])
      classes_[part_.part_of[node]][c].push_back(node);

  rng_.reserve(part_.parts);
  for (int p = 0; p < part_.parts; ++p)
    rng_.push_back(make_stream(seed, streams::kPartition, static_cast<std::uint64_t>(p)));

  // Owners draw initial values for their nodes in ascending node order, the
  // same consumption pattern as a fresh single chain; then one synchronizing
  // exchange fills the shadows.
  spins_.resize(g.node_count);
  for (int v = 0; v < g.node_count; ++v)
    spins_[v] = rng_[part_.part_of[v]].uniform_pm1() < 0.0 ? -1 : 1;
  shadow_.assign(part_.parts, spins_);
}

void ClusterSampler::exchange() {
  // Every owner publishes its boundary spins; interior foreign nodes are
  // never read (a foreign neighbor always sits across a cut edge).
  for (auto& shadow : shadow_)
    for (const auto& owned : part_.boundary_nodes)
      for (int v : owned) shadow[v] = spins_[v];
}

void ClusterSampler::sweep() {
  if (sweeps_ % static_cast<std::uint64_t>(tau_) == 0) exchange();
  const SparseGraph& g = *net_->graph;
  for (int p = 0; p < part_.parts; ++p) {
    const auto& shadow = shadow_[p];
    auto& rng = rng_[p];
    for (const auto& nodes : classes_[p]) {
      for (int node : nodes) {
        double field = net_->weights.node_bias[node];
        const auto& nbr = g.neighbors[node];
        const auto& inc = g.incident_edge[node];
        for (std::size_t m = 0; m < nbr.size(); ++m) {
          const int w = nbr[m];
          const std::int8_t s = part_.part_of[w] == p ? spins_[w] : shadow[w];
          field += net_->weights.edge_weight[inc[m]] * s;
        }
        spins_[node] = pbit_update(field, net_->beta, rng);
      }
    }
  }
  ++sweeps_;
}

std::uint64_t ClusterSampler::boundary_bits_per_exchange() const {
  std::uint64_t total = 0;
  for (const auto& owned : part_.boundary_nodes) total += owned.size();
  return total;
}

std::vector<StalenessRow> staleness_energy_scan(const Topology& topo,
                                                const ModelParameters& params,
                                                int parts,
                                                const StalenessScanOptions& opt) {
  if (topo.arch != Arch::frbm)
    throw config_error("staleness scan: estimator needs a single hidden layer");
  if (opt.n_samples < 2) throw config_error("staleness scan: need at least 2 samples");
  const auto bonds = build_tfim_bonds(topo.L);
  const PbitNetwork net(topo, make_sampler_weights(topo, params), opt.beta);
  const GraphPartition split = partition_graph(topo.graph, parts, opt.seed);

  std::vector<double> e(opt.n_samples);
  const auto visible_energy = [&](const std::vector<std::int8_t>& spins) {
    return local_energy_rbm_value(
        topo, params,
        std::span<const std::int8_t>(spins.data(),
                                     static_cast<std::size_t>(topo.n_visible)),
        bonds, opt.J, opt.gamma_x);
  };
  const auto summarize = [&](int tau, double e_ref) {
    StalenessRow row;
    row.tau = tau;
    row.energy_per_spin = std::accumulate(e.begin(), e.end(), 0.0) /
                          (static_cast<double>(e.size()) * topo.n_visible);
    row.std_err = blocking_se(e, opt.blocking_bins) / topo.n_visible;
    row.deviation = std::abs(row.energy_per_spin - e_ref);
    return row;
  };

  // Synchronous baseline, reported as the tau = 0 row.  Its stream index
  // sits just past the per-part streams of the partitioned runs.
  ChainState chain = make_chain(
      net, make_stream(opt.seed, streams::kPartition, static_cast<std::uint64_t>(parts)));
  for (int s = 0; s < opt.burn_in; ++s) chromatic_sweep(net, chain);
  for (std::size_t r = 0; r < opt.n_samples; ++r) {
    for (int s = 0; s < opt.sweeps_per_sample; ++s) chromatic_sweep(net, chain);
    e[r] = visible_energy(chain.spins);
  }
  std::vector<StalenessRow> rows{summarize(0, 0.0)};
  rows[0].deviation = 0.0;
  const double e_ref = rows[0].energy_per_spin;

  for (std::size_t run = 0; run < opt.taus.size(); ++run) {
    // Fresh master seed per run; streams under different seeds are unrelated.
    const std::uint64_t run_seed = opt.seed + 0x9e3779b97f4a7c15ULL * (run + 1);
    ClusterSampler sampler(net, split, opt.taus[run], run_seed);
    for (int s = 0; s < opt.burn_in; ++s) sampler.sweep();
    for (std::size_t rec = 0; rec < opt.n_samples; ++rec) {
      for (int s = 0; s < opt.sweeps_per_sample; ++s) sampler.sweep();
      e[rec] = visible_energy(sampler.spins());
    }
    rows.push_back(summarize(opt.taus[run], e_ref));
  }
  return rows;
}

}  // namespace pnqs
