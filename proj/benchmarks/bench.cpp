// Microbenchmarks for the hot paths: sweep kernels, the clamped-chain
// estimator, and the natural-gradient linear algebra.  Not part of ctest.

#include <benchmark/benchmark.h>

#include "pnqs/estimator.hpp"
#include "pnqs/lattice.hpp"
#include "pnqs/model.hpp"
#include "pnqs/rng.hpp"
#include "pnqs/sampler.hpp"
#include "pnqs/sr.hpp"

using namespace pnqs;

namespace {

void bm_chromatic_sweep(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const Topology topo = build_topology(Arch::frbm, L, 2.0);
  const ModelParameters params = init_params(topo, make_stream(1, streams::kParamInit, 0));
  const PbitNetwork net(topo, make_sampler_weights(topo, params));
  ChainState chain = make_chain(net, make_stream(1, streams::kOuterChain, 0));
  for (auto _ : state) {
    chromatic_sweep(net, chain);
    benchmark::DoNotOptimize(chain.spins.data());
  }
  state.SetItemsProcessed(state.iterations() * topo.node_count());
}

void bm_clamped_sweep(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const Topology topo = build_topology(Arch::dbm, L, 1.0, 1.0);
  const ModelParameters params = init_params(topo, make_stream(2, streams::kParamInit, 0));
  const PbitNetwork net(topo, make_sampler_weights(topo, params));
  ChainState chain = make_chain(net, make_stream(2, streams::kOuterChain, 0));
  for (auto _ : state) {
    clamped_sweep(net, chain);
    benchmark::DoNotOptimize(chain.spins.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          (topo.node_count() - topo.n_visible));
}

void bm_dual_stats(benchmark::State& state) {
  const int n_inner = static_cast<int>(state.range(0));
  const Topology topo = build_topology(Arch::dbm, 3, 1.0, 1.0);
  const ModelParameters params = init_params(topo, make_stream(3, streams::kParamInit, 0));
  const SamplerWeights w = make_sampler_weights(topo, params);
  const PbitNetwork net(topo, w);
  ChainState chain = make_chain(net, make_stream(3, streams::kOuterChain, 0));
  for (auto _ : state) {
    const DualSampleStats stats = accumulate_dual_stats(topo, w, net, chain, n_inner);
    benchmark::DoNotOptimize(stats.p_flip.data());
  }
  state.SetItemsProcessed(state.iterations() * n_inner);
}

void bm_local_energy_rbm(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const Topology topo = build_topology(Arch::frbm, L, 2.0);
  const ModelParameters params = init_params(topo, make_stream(4, streams::kParamInit, 0));
  const auto bonds = build_tfim_bonds(L);
  const PbitNetwork net(topo, make_sampler_weights(topo, params));
  const SampleBatch batch =
      sample_visible(net, topo.n_visible, 64, 100, 1, make_stream(4, streams::kOuterChain, 0));
  std::size_t s = 0;
  for (auto _ : state) {
    const auto rec = local_energy_rbm(topo, params, batch.visible(s), bonds, 1.0, 3.044);
    benchmark::DoNotOptimize(rec.e_loc);
    s = (s + 1) % batch.size();
  }
  state.SetItemsProcessed(state.iterations() * topo.n_visible);
}

SrBatch random_batch(std::size_t n_samples, std::size_t n_params) {
  Xoshiro256pp rng = make_stream(5, streams::kScratch, 0);
  SrBatch b;
  b.n_samples = n_samples;
  b.n_params = n_params;
  b.o.resize(n_samples * n_params);
  b.e.resize(n_samples);
  for (auto& x : b.o) x = rng.uniform_pm1();
  for (auto& x : b.e) x = rng.uniform_pm1();
  b.finalize();
  return b;
}

void bm_fisher_matvec(benchmark::State& state) {
  const std::size_t n_params = static_cast<std::size_t>(state.range(0));
  const SrBatch b = random_batch(1000, n_params);
  std::vector<double> x(n_params, 1.0), out(n_params);
  for (auto _ : state) {
    fisher_matvec(b, 1e-3, x, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * b.n_samples * n_params);
}

void bm_cg_solve(benchmark::State& state) {
  const std::size_t n_params = static_cast<std::size_t>(state.range(0));
  const SrBatch b = random_batch(1000, n_params);
  const std::vector<double> rhs = gradient(b);
  const auto apply = [&](std::span<const double> v, std::span<double> out) {
    fisher_matvec(b, 1e-3, v, out);
  };
  for (auto _ : state) {
    const CgResult res = cg_solve(apply, rhs, 1e-4, 100);
    benchmark::DoNotOptimize(res.x.data());
  }
}

}  // namespace

BENCHMARK(bm_chromatic_sweep)->Arg(10)->Arg(20)->Arg(40);
BENCHMARK(bm_clamped_sweep)->Arg(10)->Arg(20)->Arg(40);
BENCHMARK(bm_dual_stats)->Arg(100)->Arg(1000);
BENCHMARK(bm_local_energy_rbm)->Arg(10)->Arg(20);
BENCHMARK(bm_fisher_matvec)->Arg(700)->Arg(1500)->Arg(3100);
BENCHMARK(bm_cg_solve)->Arg(700)->Arg(1500);

BENCHMARK_MAIN();
