#include "pnqs/sr.hpp"

#include <cmath>
#include <string>

#include "pnqs/errors.hpp"

namespace pnqs {

void SrBatch::finalize() {
  if (n_samples < 2) throw config_error("optimizer batch needs at least two samples");
  if (o.size() != n_samples * n_params || e.size() != n_samples)
    throw config_error("optimizer batch arrays do not match the declared shape");
  o_mean.assign(n_params, 0.0);
  double e_acc = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    e_acc += e[s];
    const double* row = o.data() + s * n_params;
    for (std::size_t k = 0; k < n_params; ++k) o_mean[k] += row[k];
  }
  const double inv = 1.0 / static_cast<double>(n_samples);
  e_mean = e_acc * inv;
  for (auto& m : o_mean) m *= inv;
  finalized = true;
}

std::vector<double> gradient(const SrBatch& batch) {
  if (!batch.finalized) throw config_error("batch not finalized");
  std::vector<double> g(batch.n_params, 0.0);
  for (std::size_t s = 0; s < batch.n_samples; ++s) {
    const double* row = batch.o.data() + s * batch.n_params;
    const double es = batch.e[s];
    for (std::size_t k = 0; k < batch.n_params; ++k) g[k] += es * row[k];
  }
  const double inv = 1.0 / static_cast<double>(batch.n_samples);
  for (std::size_t k = 0; k < batch.n_params; ++k)
    g[k] = 2.0 * (g[k] * inv - batch.e_mean * batch.o_mean[k]);
  return g;
}

void fisher_matvec(const SrBatch& batch, double lambda, std::span<const double> x,
                   std::span<double> out) {
  if (!batch.finalized) throw config_error("batch not finalized");
  // S x = <O (O . x)> - O_mean (O_mean . x), accumulated sample-by-sample in
  // index order: bit-stable across repeated calls.
  double mean_dot = 0.0;
  for (std::size_t k = 0; k < batch.n_params; ++k) mean_dot += batch.o_mean[k] * x[k];
  for (std::size_t k = 0; k < batch.n_params; ++k) out[k] = 0.0;
  for (std::size_t s = 0; s < batch.n_samples; ++s) {
    const double* row = batch.o.data() + s * batch.n_params;
    double dot = 0.0;
    for (std::size_t k = 0; k < batch.n_params; ++k) dot += row[k] * x[k];
    for (std::size_t k = 0; k < batch.n_params; ++k) out[k] += row[k] * dot;
  }
  const double inv = 1.0 / static_cast<double>(batch.n_samples);
  for (std::size_t k = 0; k < batch.n_params; ++k)
    out[k] = out[k] * inv - batch.o_mean[k] * mean_dot + lambda * x[k];
}

CgResult cg_solve(const MatVec& apply, std::span<const double> b, double tol,
                  int max_iter) {
  const std::size_t n = b.size();
  CgResult res;
  res.x.assign(n, 0.0);

  double b_norm_sq = 0.0;
  for (double v : b) b_norm_sq += v * v;
  const double b_norm = std::sqrt(b_norm_sq);
  if (b_norm == 0.0) {
    res.converged = true;
    return res;
  }

  std::vector<double> r(b.begin(), b.end());
  std::vector<double> p = r;
  std::vector<double> ap(n);
  double rs = b_norm_sq;

  for (int it = 0; it < max_iter; ++it) {
    apply(p, ap);
    double p_ap = 0.0;
    for (std::size_t k = 0; k < n; ++k) p_ap += p[k] * ap[k];
    if (!(p_ap > 0.0))
      throw numerical_error("conjugate gradient hit a non-positive curvature direction");
    const double alpha = rs / p_ap;
    for (std::size_t k = 0; k < n; ++k) {
      res.x[k] += alpha * p[k];
      r[k] -= alpha * ap[k];
    }
    double rs_next = 0.0;
    for (double v : r) rs_next += v * v;
    res.iterations = it + 1;
    res.rel_residual = std::sqrt(rs_next) / b_norm;
    if (res.rel_residual <= tol) {
      res.converged = true;
      return res;
    }
    const double beta = rs_next / rs;
    for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * p[k];
    rs = rs_next;
  }
  res.converged = false;
  return res;
}

double cosine_lr(int t, int n_iter, double eta_max, double eta_min) {
  if (n_iter <= 0) throw config_error("cosine schedule needs n_iter > 0");
  const double phase = 3.14159265358979323846 * static_cast<double>(t) /
                       static_cast<double>(n_iter);
  return eta_min + 0.5 * (eta_max - eta_min) * (1.0 + std::cos(phase));
}

double lambda_schedule(int t, double lambda0, double b0, double lambda_min) {
  return std::max(lambda_min, lambda0 * std::pow(b0, static_cast<double>(t)));
}

SrStep sr_step(SrBatch& batch, int t, const SrSchedules& sched) {
  if (!batch.finalized) batch.finalize();
  const std::vector<double> g = gradient(batch);
  for (double v : g)
    if (!std::isfinite(v))
      throw numerical_error("non-finite force component at iteration " + std::to_string(t));

  SrStep step;
  step.lr = cosine_lr(t, sched.n_iter, sched.eta_max, sched.eta_min);
  step.lambda = lambda_schedule(t, sched.lambda0, sched.b0, sched.lambda_min);

  const auto apply = [&](std::span<const double> x, std::span<double> out) {
    fisher_matvec(batch, step.lambda, x, out);
  };
  CgResult cg = cg_solve(apply, g, sched.cg_tol, sched.cg_max_iter);
  step.cg_iterations = cg.iterations;
  step.cg_converged = cg.converged;
  step.delta.resize(batch.n_params);
  for (std::size_t k = 0; k < batch.n_params; ++k) step.delta[k] = -step.lr * cg.x[k];
  return step;
}

}  // namespace pnqs
