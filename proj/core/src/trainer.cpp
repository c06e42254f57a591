#include "pnqs/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "pnqs/errors.hpp"
#include "pnqs/parallel.hpp"
#include "pnqs/rng.hpp"
#include "pnqs/sampler.hpp"

namespace pnqs {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Per-sample RNG streams for the clamped chains: consecutive jumps from the
// cursor, precomputed so batch workers can run in any order.  The cursor is
// left past the last stream handed out.
std::vector<Xoshiro256pp> substreams(Xoshiro256pp& cursor, std::size_t count) {
  std::vector<Xoshiro256pp> streams;
  streams.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    cursor.jump();
    streams.push_back(cursor);
  }
  return streams;
}

void check_finite_energies(const SrBatch& batch, int iter) {
  for (std::size_t s = 0; s < batch.n_samples; ++s)
    if (!std::isfinite(batch.e[s]))
      throw numerical_error(
          "non-finite local energy in sample " + std::to_string(s) +
          " at iteration " + std::to_string(iter) +
          " (exp clips so far: " + std::to_string(exp_clip_count()) + ")");
}

// Fills one optimizer batch from the recorded samples.
void fill_batch(const TrainingConfig& cfg, const Topology& topo,
                const ModelParameters& params, const SamplerWeights& field_w,
                const PbitNetwork& net, const SampleBatch& samples,
                const std::vector<std::pair<int, int>>& bonds,
                const std::vector<Xoshiro256pp>& inner_streams, SrBatch& batch) {
  const ParamLayout lay = ParamLayout::from(topo);
  batch.n_samples = samples.size();
  batch.n_params = lay.total;
  batch.o.resize(batch.n_samples * batch.n_params);
  batch.e.resize(batch.n_samples);
  batch.finalized = false;

  parallel_for(samples.size(), [&](std::size_t s) {
    LocalEnergyRecord rec =
        cfg.arch == Arch::frbm
            ? local_energy_rbm(topo, params, samples.visible(s), bonds, cfg.J,
                               cfg.gamma_x)
            : local_energy_dbm(topo, field_w, net, samples.full(s),
                               inner_streams[s], bonds, cfg.J, cfg.gamma_x,
                               cfg.n_inner);
    batch.e[s] = rec.e_loc;
    std::copy(rec.o.begin(), rec.o.end(), batch.o.begin() + s * batch.n_params);
  });
}

}  // namespace

TrainResult train(const TrainingConfig& cfg, const MetricsSink& sink) {
  TrainResult out;
  out.topo = build_topology(cfg.arch, cfg.L, cfg.k1, cfg.k2);
  const Topology& topo = out.topo;
  const auto bonds = build_tfim_bonds(cfg.L);
  const ParamLayout lay = ParamLayout::from(topo);

  ModelParameters params =
      init_params(topo, make_stream(cfg.seed, streams::kParamInit, 0));
  std::vector<double> flat = to_flat(params);

  // The visible chain persists across iterations; each iteration re-burns
  // after the parameter update before recording.
  Xoshiro256pp chain_rng = make_stream(cfg.seed, streams::kOuterChain, 0);
  ChainState chain;
  bool chain_ready = false;

  Xoshiro256pp iter_region = make_stream(cfg.seed, streams::kIterBase, 0);

  out.history.reserve(static_cast<std::size_t>(cfg.sched.n_iter));
  for (int t = 0; t < cfg.sched.n_iter; ++t) {
    const auto t0 = Clock::now();

    const ModelParameters sampler_params =
        cfg.quantize_sampler ? quantize(params, cfg.fmt) : params;
    const SamplerWeights w_sampler = make_sampler_weights(topo, sampler_params);
    const SamplerWeights w_field =
        cfg.quantize_fields ? w_sampler : make_sampler_weights(topo, params);
    const PbitNetwork net(topo, w_sampler, cfg.beta);

    if (!chain_ready) {
      chain = make_chain(net, chain_rng);
      chain_ready = true;
    }
    const SampleBatch samples =
        collect_samples(net, chain, topo.n_visible, cfg.n_samples,
                        cfg.effective_burn_in(), cfg.sweeps_per_sample);

    std::vector<Xoshiro256pp> inner_streams;
    if (cfg.arch == Arch::dbm) inner_streams = substreams(iter_region, samples.size());
    iter_region.long_jump();

    SrBatch batch;
    fill_batch(cfg, topo, params, w_field, net, samples, bonds, inner_streams, batch);
    check_finite_energies(batch, t + 1);
    batch.finalize();

    SrStep step = sr_step(batch, t, cfg.sched);
    for (std::size_t k = 0; k < lay.total; ++k) {
      flat[k] += step.delta[k];
      if (!std::isfinite(flat[k]))
        throw numerical_error("non-finite parameter " + std::to_string(k) +
                              " after iteration " + std::to_string(t + 1));
    }
    params = from_flat(topo, flat);

    IterationMetrics m;
    m.iter = t + 1;
    m.energy_per_spin = batch.e_mean / topo.n_visible;
    m.std_err = blocking_se(batch.e, cfg.blocking_bins) / topo.n_visible;
    m.lr = step.lr;
    m.lambda = step.lambda;
    m.cg_iters = step.cg_iterations;
    m.cg_flag = step.cg_converged ? 0 : 1;
    m.wall_ms = ms_since(t0);
    out.history.push_back(m);
    if (sink) sink(m);
  }

  out.params = params;
  return out;
}

EvalResult evaluate(const TrainingConfig& cfg, const Topology& topo,
                    const ModelParameters& params) {
  const auto bonds = build_tfim_bonds(cfg.L);
  const ModelParameters sampler_params =
      cfg.quantize_sampler ? quantize(params, cfg.fmt) : params;
  const SamplerWeights w_sampler = make_sampler_weights(topo, sampler_params);
  const SamplerWeights w_field =
      cfg.quantize_fields ? w_sampler : make_sampler_weights(topo, params);
  const PbitNetwork net(topo, w_sampler, cfg.beta);

  ChainState chain = make_chain(net, make_stream(cfg.seed, streams::kEvalChain, 0));
  Xoshiro256pp inner_cursor = make_stream(cfg.seed, streams::kEvalInner, 0);

  std::vector<double> e(cfg.n_eval);
  constexpr std::size_t kChunk = 20000;
  std::size_t done = 0;
  int burn = cfg.effective_burn_in();
  while (done < cfg.n_eval) {
    const std::size_t count = std::min(kChunk, cfg.n_eval - done);
    const SampleBatch samples = collect_samples(net, chain, topo.n_visible, count,
                                                burn, cfg.sweeps_per_sample);
    burn = 0;  // chain persists between chunks
    std::vector<Xoshiro256pp> inner_streams;
    if (cfg.arch == Arch::dbm) inner_streams = substreams(inner_cursor, count);

    parallel_for(count, [&](std::size_t s) {
      e[done + s] =
          cfg.arch == Arch::frbm
              ? local_energy_rbm_value(topo, params, samples.visible(s), bonds,
                                       cfg.J, cfg.gamma_x)
              : local_energy_dbm(topo, w_field, net, samples.full(s),
                                 inner_streams[s], bonds, cfg.J, cfg.gamma_x,
                                 cfg.n_inner)
                    .e_loc;
    });
    done += count;
  }

  double mean = 0.0;
  for (double v : e) mean += v;
  mean /= static_cast<double>(e.size());
  if (!std::isfinite(mean)) throw numerical_error("non-finite evaluation energy");

  EvalResult res;
  res.energy_per_spin = mean / topo.n_visible;
  res.std_err = blocking_se(e, cfg.blocking_bins) / topo.n_visible;
  res.n_samples = e.size();
  return res;
}

double blocking_se(std::span<const double> samples, int bins) {
  if (bins < 1) throw config_error("blocking needs at least one bin");
  const std::size_t n = samples.size();
  if (n < 2) return 0.0;
  const std::size_t b = std::min<std::size_t>(static_cast<std::size_t>(bins), n);
  const std::size_t block = n / b;  // remainder truncated
  std::vector<double> means(b, 0.0);
  for (std::size_t m = 0; m < b; ++m) {
    double acc = 0.0;
    for (std::size_t i = m * block; i < (m + 1) * block; ++i) acc += samples[i];
    means[m] = acc / static_cast<double>(block);
  }
  if (b < 2) return 0.0;
  double mean = 0.0;
  for (double v : means) mean += v;
  mean /= static_cast<double>(b);
  double var = 0.0;
  for (double v : means) var += (v - mean) * (v - mean);
  var /= static_cast<double>(b - 1);
  return std::sqrt(var / static_cast<double>(b));
}

bool chemical_accuracy_check(double e, double e_ref, double band) {
  if (e_ref == 0.0)
    throw config_error("chemical-accuracy band is relative; reference must be nonzero");
  return std::abs(e - e_ref) <= band * std::abs(e_ref);
}

void write_metrics_header(std::ostream& out) {
  out << "iter,energy_per_spin,std_err,lr,lambda,cg_iters,cg_flag,wall_ms\n";
}

void write_metrics_row(std::ostream& out, const IterationMetrics& m) {
  char line[256];
  std::snprintf(line, sizeof line, "%d,%.12g,%.12g,%.12g,%.12g,%d,%d,%.6g\n", m.iter,
                m.energy_per_spin, m.std_err, m.lr, m.lambda, m.cg_iters, m.cg_flag,
                m.wall_ms);
  out << line;
}

}  // namespace pnqs
