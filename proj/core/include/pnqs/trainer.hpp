#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "pnqs/estimator.hpp"
#include "pnqs/model.hpp"
#include "pnqs/sr.hpp"

namespace pnqs {

// Everything one optimization run needs.  Defaults follow the reference
// operating point; desk-scale runs shrink the budgets, not the algorithm.
struct TrainingConfig {
  Arch arch = Arch::frbm;
  int L = 0;
  double k1 = 2.0;
  double k2 = 1.0;

  double J = 1.0;
  double gamma_x = 3.044;

  std::size_t n_samples = 10000;      // visible samples per iteration
  int n_inner = 1000;                 // clamped samples per visible sample
  std::size_t n_eval = 1000000;       // evaluation samples
  int burn_in = -1;                   // sweeps before recording; -1 = 10 L
  int sweeps_per_sample = 1;
  double beta = 1.0;

  SrSchedules sched;

  bool quantize_sampler = false;      // sweep with fixed-point parameters
  bool quantize_fields = false;       // flip-ratio fields fixed-point too
  FixedPointFormat fmt;

  int blocking_bins = 50;
  std::uint64_t seed = 1;

  int effective_burn_in() const { return burn_in >= 0 ? burn_in : 10 * L; }
};

struct IterationMetrics {
  int iter = 0;  // 1-based
  double energy_per_spin = 0.0;
  double std_err = 0.0;
  double lr = 0.0;
  double lambda = 0.0;
  int cg_iters = 0;
  int cg_flag = 0;  // 1 if CG stopped on the iteration cap
  double wall_ms = 0.0;
};

struct TrainResult {
  Topology topo;
  ModelParameters params;
  std::vector<IterationMetrics> history;
};

using MetricsSink = std::function<void(const IterationMetrics&)>;

// Full optimization loop: sample, estimate, solve, update.  Aborts with
// numerical_error (diagnostics in the message) if energies or parameters
// stop being finite.  The sink, when given, sees each row as it is made.
TrainResult train(const TrainingConfig& cfg, const MetricsSink& sink = {});

struct EvalResult {
  double energy_per_spin = 0.0;
  double std_err = 0.0;        // blocking standard error, per spin
  std::size_t n_samples = 0;
};

// Fixed-parameter estimate of the energy with blocking error bars.
EvalResult evaluate(const TrainingConfig& cfg, const Topology& topo,
                    const ModelParameters& params);

// Standard error of the mean from a blocking analysis: bins consecutive
// blocks (remainder truncated), then std of block means / sqrt(bins).
double blocking_se(std::span<const double> samples, int bins);

// |e - e_ref| <= band * |e_ref|; e_ref must be nonzero.
bool chemical_accuracy_check(double e, double e_ref, double band = 1.6e-3);

// Metrics CSV: header "iter,energy_per_spin,std_err,lr,lambda,cg_iters,
// cg_flag,wall_ms".
void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const IterationMetrics& m);

}  // namespace pnqs
