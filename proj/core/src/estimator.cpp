#include "pnqs/estimator.hpp"

#include <atomic>
#include <cmath>

#include "pnqs/errors.hpp"

namespace pnqs {

namespace {

std::atomic<std::uint64_t> g_exp_clips{0};

double log2cosh(double x) {
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax));
}

// exp with the argument clipped to +-500; keeps a single extreme field from
// turning a whole batch non-finite.
double clipped_exp(double x) {
  if (x > 500.0 || x < -500.0) {
    g_exp_clips.fetch_add(1, std::memory_order_relaxed);
    x = x > 0.0 ? 500.0 : -500.0;
  }
  return std::exp(x);
}

}  // namespace

std::uint64_t exp_clip_count() { return g_exp_clips.load(std::memory_order_relaxed); }
void reset_exp_clip_count() { g_exp_clips.store(0, std::memory_order_relaxed); }

double diagonal_energy(std::span<const std::int8_t> visible,
                       const std::vector<std::pair<int, int>>& bonds, double J) {
  long long aligned = 0;
  for (auto [i, j] : bonds) aligned += visible[i] * visible[j];
  return -J * static_cast<double>(aligned);
}

namespace {

// Hidden pre-activations theta_j = b_j + sum_i W_ij s_i for all j.
void hidden_activations(const Topology& topo, const ModelParameters& params,
                        std::span<const std::int8_t> visible, std::vector<double>& theta) {
  theta.resize(topo.n_hidden);
  for (int j = 0; j < topo.n_hidden; ++j) {
    const int node = topo.n_visible + j;
    double t = params.hidden_bias[j];
    const auto& nbr = topo.graph.neighbors[node];
    const auto& inc = topo.graph.incident_edge[node];
    for (std::size_t m = 0; m < nbr.size(); ++m)
      t += params.vh_weights[inc[m]] * visible[nbr[m]];
    theta[j] = t;
  }
}

// log Psi(S^(i)) - log Psi(S) given precomputed activations: only the
// hidden units inside the mask of site i change.
double flip_log_ratio(const Topology& topo, const ModelParameters& params,
                      std::span<const std::int8_t> visible,
                      const std::vector<double>& theta, int site) {
  double delta = -2.0 * params.visible_bias[site] * visible[site];
  const auto& nbr = topo.graph.neighbors[site];
  const auto& inc = topo.graph.incident_edge[site];
  for (std::size_t m = 0; m < nbr.size(); ++m) {
    const int j = nbr[m] - topo.n_visible;
    const double shifted = theta[j] - 2.0 * params.vh_weights[inc[m]] * visible[site];
    delta += log2cosh(shifted) - log2cosh(theta[j]);
  }
  return 0.5 * delta;
}

}  // namespace

double rbm_ratio(const Topology& topo, const ModelParameters& params,
                 std::span<const std::int8_t> visible, int site) {
  std::vector<double> theta;
  hidden_activations(topo, params, visible, theta);
  return std::exp(flip_log_ratio(topo, params, visible, theta, site));
}

LocalEnergyRecord local_energy_rbm(const Topology& topo, const ModelParameters& params,
                                   std::span<const std::int8_t> visible,
                                   const std::vector<std::pair<int, int>>& bonds,
                                   double J, double gamma_x) {
  const ParamLayout lay = ParamLayout::from(topo);
  LocalEnergyRecord rec;
  rec.o.assign(lay.total, 0.0);

  std::vector<double> theta;
  hidden_activations(topo, params, visible, theta);

  double offdiag = 0.0;
  for (int i = 0; i < topo.n_visible; ++i)
    offdiag += std::exp(flip_log_ratio(topo, params, visible, theta, i));
  rec.e_loc = diagonal_energy(visible, bonds, J) - gamma_x * offdiag;

  for (int i = 0; i < topo.n_visible; ++i)
    rec.o[lay.a_offset + i] = 0.5 * visible[i];
  std::vector<double> tanh_theta(topo.n_hidden);
  for (int j = 0; j < topo.n_hidden; ++j) {
    tanh_theta[j] = std::tanh(theta[j]);
    rec.o[lay.b_offset + j] = 0.5 * tanh_theta[j];
  }
  for (std::size_t e = 0; e < topo.vh_edge_count; ++e) {
    auto [i, j] = topo.graph.edges[e];
    rec.o[lay.vh_offset + e] = 0.5 * visible[i] * tanh_theta[j - topo.n_visible];
  }
  return rec;
}

double local_energy_rbm_value(const Topology& topo, const ModelParameters& params,
                              std::span<const std::int8_t> visible,
                              const std::vector<std::pair<int, int>>& bonds,
                              double J, double gamma_x) {
  std::vector<double> theta;
  hidden_activations(topo, params, visible, theta);
  double offdiag = 0.0;
  for (int i = 0; i < topo.n_visible; ++i)
    offdiag += std::exp(flip_log_ratio(topo, params, visible, theta, i));
  return diagonal_energy(visible, bonds, J) - gamma_x * offdiag;
}

DualSampleStats accumulate_dual_stats(const Topology& topo,
                                      const SamplerWeights& field_weights,
                                      const PbitNetwork& net, ChainState& chain,
                                      int n_inner) {
  if (n_inner <= 0) throw config_error("dual sampling needs at least one inner sample");
  const SparseGraph& g = *net.graph;
  DualSampleStats stats;
  stats.p_flip.assign(topo.n_visible, 0.0);
  stats.p_flip_sq.assign(topo.n_visible, 0.0);
  stats.o_hidden.assign(topo.n_hidden, 0.0);
  stats.o_deep.assign(topo.n_deep, 0.0);
  stats.o_edge.assign(g.edges.size(), 0.0);
  stats.n_samples = n_inner;

  for (int t = 0; t < n_inner; ++t) {
    clamped_sweep(net, chain);
    for (int i = 0; i < topo.n_visible; ++i) {
      // Energy cost of flipping visible spin i in the current full state.
      const double field = local_field(g, field_weights, chain.spins, i);
      const double x = -2.0 * field * chain.spins[i];
      stats.p_flip[i] += clipped_exp(x);
      stats.p_flip_sq[i] += clipped_exp(2.0 * x);
    }
    for (int j = 0; j < topo.n_hidden; ++j)
      stats.o_hidden[j] += 0.5 * chain.spins[topo.n_visible + j];
    for (int l = 0; l < topo.n_deep; ++l)
      stats.o_deep[l] += 0.5 * chain.spins[topo.n_visible + topo.n_hidden + l];
    for (std::size_t e = 0; e < g.edges.size(); ++e)
      stats.o_edge[e] += 0.5 * chain.spins[g.edges[e].first] * chain.spins[g.edges[e].second];
  }

  const double inv = 1.0 / static_cast<double>(n_inner);
  for (auto* arr : {&stats.p_flip, &stats.p_flip_sq, &stats.o_hidden, &stats.o_deep,
                    &stats.o_edge})
    for (auto& x : *arr) x *= inv;
  return stats;
}

double taylor_corrected_amplitude(double p_mean, double p_sq_mean, int n_samples) {
  if (!(p_mean > 0.0))
    throw numerical_error("collapsed flip-ratio estimate: mean " +
                          std::to_string(p_mean) + " is not positive");
  double var_of_mean = (p_sq_mean - p_mean * p_mean) / static_cast<double>(n_samples);
  if (var_of_mean < 0.0) var_of_mean = 0.0;  // rounding at zero variance
  const double root = std::sqrt(p_mean);
  return root + var_of_mean / (8.0 * p_mean * root);
}

LocalEnergyRecord assemble_dbm_record(const Topology& topo, const DualSampleStats& stats,
                                      std::span<const std::int8_t> visible,
                                      const std::vector<std::pair<int, int>>& bonds,
                                      double J, double gamma_x) {
  const ParamLayout lay = ParamLayout::from(topo);
  LocalEnergyRecord rec;
  rec.o.assign(lay.total, 0.0);

  double offdiag = 0.0;
  for (int i = 0; i < topo.n_visible; ++i)
    offdiag += taylor_corrected_amplitude(stats.p_flip[i], stats.p_flip_sq[i],
                                          stats.n_samples);
  rec.e_loc = diagonal_energy(visible, bonds, J) - gamma_x * offdiag;

  for (int i = 0; i < topo.n_visible; ++i)
    rec.o[lay.a_offset + i] = 0.5 * visible[i];  // clamped, hence exact
  for (int j = 0; j < topo.n_hidden; ++j) rec.o[lay.b_offset + j] = stats.o_hidden[j];
  for (int l = 0; l < topo.n_deep; ++l) rec.o[lay.c_offset + l] = stats.o_deep[l];
  for (std::size_t e = 0; e < stats.o_edge.size(); ++e)
    rec.o[lay.vh_offset + e] = stats.o_edge[e];  // vh block then hd block
  return rec;
}

LocalEnergyRecord local_energy_dbm(const Topology& topo,
                                   const SamplerWeights& field_weights,
                                   const PbitNetwork& net,
                                   std::span<const std::int8_t> full_state,
                                   Xoshiro256pp rng,
                                   const std::vector<std::pair<int, int>>& bonds,
                                   double J, double gamma_x, int n_inner) {
  ChainState chain;
  chain.spins.assign(full_state.begin(), full_state.end());
  chain.rng = rng;
  DualSampleStats stats = accumulate_dual_stats(topo, field_weights, net, chain, n_inner);
  return assemble_dbm_record(topo, stats, full_state.subspan(0, topo.n_visible), bonds,
                             J, gamma_x);
}

}  // namespace pnqs
