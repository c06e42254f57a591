#pragma once

#include <functional>
#include <span>
#include <vector>

namespace pnqs {

// One optimization batch: per-sample local energies and log-derivative
// rows.  finalize() computes the means every other routine needs; all
// reductions run in a fixed order so results are bit-stable regardless of
// how the rows were produced.
struct SrBatch {
  std::size_t n_samples = 0;
  std::size_t n_params = 0;
  std::vector<double> o;  // row-major, n_samples x n_params
  std::vector<double> e;  // n_samples

  std::vector<double> o_mean;
  double e_mean = 0.0;
  bool finalized = false;

  double o_at(std::size_t s, std::size_t k) const { return o[s * n_params + k]; }
  void finalize();
};

// Force vector g_k = 2 (<e O_k> - <e><O_k>).
std::vector<double> gradient(const SrBatch& batch);

// out = (S + lambda I) x with S the centered covariance of the O rows,
// applied matrix-free in two passes over the batch.
void fisher_matvec(const SrBatch& batch, double lambda, std::span<const double> x,
                   std::span<double> out);

using MatVec = std::function<void(std::span<const double>, std::span<double>)>;

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

// Conjugate gradient from the zero vector; stops when the residual drops
// below tol * |b| or after max_iter iterations (flagged, not fatal).
CgResult cg_solve(const MatVec& apply, std::span<const double> b, double tol,
                  int max_iter);

// eta(t) = eta_min + (eta_max - eta_min) (1 + cos(pi t / n_iter)) / 2.
double cosine_lr(int t, int n_iter, double eta_max, double eta_min);

// lambda(t) = max(lambda_min, lambda0 * b0^t).
double lambda_schedule(int t, double lambda0, double b0, double lambda_min);

struct SrSchedules {
  int n_iter = 1000;
  double eta_max = 0.1;
  double eta_min = 1e-5;
  double lambda0 = 0.1;
  double b0 = 0.9;
  double lambda_min = 1e-4;
  double cg_tol = 1e-4;
  int cg_max_iter = 500;
};

struct SrStep {
  std::vector<double> delta;  // parameter update, already scaled by -eta
  double lr = 0.0;
  double lambda = 0.0;
  int cg_iterations = 0;
  bool cg_converged = true;
};

// Solves (S + lambda(t) I) x = g and returns delta = -eta(t) x.
SrStep sr_step(SrBatch& batch, int t, const SrSchedules& sched);

}  // namespace pnqs
