#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pnqs/model.hpp"
#include "pnqs/sampler.hpp"

namespace pnqs {

// -J sum over nearest-neighbor bonds of s_i s_j.
double diagonal_energy(std::span<const std::int8_t> visible,
                       const std::vector<std::pair<int, int>>& bonds, double J);

// Psi(S with spin `site` flipped) / Psi(S) from the closed-form marginal.
double rbm_ratio(const Topology& topo, const ModelParameters& params,
                 std::span<const std::int8_t> visible, int site);

// Local energy plus log-derivative vector, laid out per ParamLayout.
struct LocalEnergyRecord {
  double e_loc = 0.0;
  std::vector<double> o;
};

LocalEnergyRecord local_energy_rbm(const Topology& topo, const ModelParameters& params,
                                   std::span<const std::int8_t> visible,
                                   const std::vector<std::pair<int, int>>& bonds,
                                   double J, double gamma_x);

// Local energy alone, for measurement passes that need no gradient.
double local_energy_rbm_value(const Topology& topo, const ModelParameters& params,
                              std::span<const std::int8_t> visible,
                              const std::vector<std::pair<int, int>>& bonds,
                              double J, double gamma_x);

// Running means collected from a visible-clamped chain.  p_flip[i] averages
// exp(-2 I_i v_i) over the clamped samples (the square root of that mean
// estimates the flip ratio for site i), p_flip_sq[i] averages the square.
// The o_* arrays average 0.5 * spin (or 0.5 * spin product per edge), i.e.
// the log-derivative estimators of biases and couplings.
struct DualSampleStats {
  std::vector<double> p_flip;
  std::vector<double> p_flip_sq;
  std::vector<double> o_hidden;
  std::vector<double> o_deep;
  std::vector<double> o_edge;  // aligned with graph edge order (vh block, hd block)
  int n_samples = 0;
};

// Runs n_inner clamped sweeps of `chain` under `net` (typically built from
// quantized parameters) and accumulates the statistics above.  Fields
// entering the flip-ratio exponent are computed from field_weights, which
// callers set to the full-precision parameters unless studying an
// all-quantized pipeline.
DualSampleStats accumulate_dual_stats(const Topology& topo,
                                      const SamplerWeights& field_weights,
                                      const PbitNetwork& net, ChainState& chain,
                                      int n_inner);

// sqrt of the sampled mean plus the second-order curvature correction
// Var_pop / (8 p^{3/2}), where Var_pop = (p_sq - p^2) / n is the variance
// of the mean.  Guards against collapsed estimates (p <= 0).
double taylor_corrected_amplitude(double p_mean, double p_sq_mean, int n_samples);

// Local energy of a deep network from clamped statistics: diagonal part
// plus -gamma_x times the corrected flip amplitudes.
LocalEnergyRecord assemble_dbm_record(const Topology& topo, const DualSampleStats& stats,
                                      std::span<const std::int8_t> visible,
                                      const std::vector<std::pair<int, int>>& bonds,
                                      double J, double gamma_x);

// Convenience wrapper: forks a clamped chain from full_state (visible spins
// clamped, auxiliary layers warm-started as recorded), accumulates and
// assembles.
LocalEnergyRecord local_energy_dbm(const Topology& topo,
                                   const SamplerWeights& field_weights,
                                   const PbitNetwork& net,
                                   std::span<const std::int8_t> full_state,
                                   Xoshiro256pp rng,
                                   const std::vector<std::pair<int, int>>& bonds,
                                   double J, double gamma_x, int n_inner);

// Exponentials in the flip-ratio accumulators are clipped at |x| = 500
// before exponentiation; the counter records how often that fired.
std::uint64_t exp_clip_count();
void reset_exp_clip_count();

}  // namespace pnqs
