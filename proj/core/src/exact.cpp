#include "pnqs/exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "pnqs/errors.hpp"
#include "pnqs/lattice.hpp"

namespace pnqs {

namespace {

constexpr int kMaxEdSites = 16;

void check_ed_size(int n_sites) {
  if (n_sites < 1 || n_sites > kMaxEdSites)
    throw config_error("exact diagonalization handles 1.." +
                       std::to_string(kMaxEdSites) + " sites, got " +
                       std::to_string(n_sites));
}

// Diagonal of H in the sz basis: bit i set <=> spin i = +1.
std::vector<double> diagonal_terms(int n_sites,
                                   const std::vector<std::pair<int, int>>& bonds,
                                   double J) {
  const std::size_t dim = std::size_t{1} << n_sites;
  for (auto [i, j] : bonds)
    if (i < 0 || j < 0 || i >= n_sites || j >= n_sites || i == j)
      throw config_error("bond (" + std::to_string(i) + "," + std::to_string(j) +
                         ") is outside the site range");
  std::vector<double> diag(dim, 0.0);
  for (std::size_t z = 0; z < dim; ++z) {
    long long aligned = 0;
    for (auto [i, j] : bonds) {
      const int si = (z >> i) & 1 ? 1 : -1;
      const int sj = (z >> j) & 1 ? 1 : -1;
      aligned += si * sj;
    }
    diag[z] = -J * static_cast<double>(aligned);
  }
  return diag;
}

void apply_hamiltonian(int n_sites, const std::vector<double>& diag, double gamma_x,
                       const std::vector<double>& x, std::vector<double>& y) {
  const std::size_t dim = x.size();
  for (std::size_t z = 0; z < dim; ++z) {
    double acc = diag[z] * x[z];
    for (int i = 0; i < n_sites; ++i) acc -= gamma_x * x[z ^ (std::size_t{1} << i)];
    y[z] = acc;
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// Smallest eigenvalue of the symmetric tridiagonal (alpha, beta) by Sturm
// bisection.
double tridiag_smallest(const std::vector<double>& alpha, const std::vector<double>& beta) {
  const int m = static_cast<int>(alpha.size());
  double lo = alpha[0], hi = alpha[0];
  for (int i = 0; i < m; ++i) {
    const double left = i > 0 ? std::abs(beta[i - 1]) : 0.0;
    const double right = i + 1 < m ? std::abs(beta[i]) : 0.0;
    lo = std::min(lo, alpha[i] - left - right);
    hi = std::max(hi, alpha[i] + left + right);
  }
  const auto count_below = [&](double x) {
    int cnt = 0;
    double d = 1.0;
    for (int i = 0; i < m; ++i) {
      const double off = i > 0 ? beta[i - 1] * beta[i - 1] : 0.0;
      d = alpha[i] - x - off / d;
      if (d == 0.0) d = 1e-300;
      if (d < 0.0) ++cnt;
    }
    return cnt;
  };
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (std::abs(lo) + 1.0); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(mid) >= 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// Eigenvector of the tridiagonal for a known eigenvalue, via inverse
// iteration on a dense copy with partial pivoting (m is tiny).
std::vector<double> tridiag_eigenvector(const std::vector<double>& alpha,
                                        const std::vector<double>& beta, double lambda) {
  const int m = static_cast<int>(alpha.size());
  const double scale = std::max(1.0, std::abs(lambda));
  std::vector<double> y(m, 1.0 / std::sqrt(static_cast<double>(m)));
  for (int pass = 0; pass < 3; ++pass) {
    // Solve (T - (lambda + shift) I) v = y.
    std::vector<double> a(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) {
      a[static_cast<std::size_t>(i) * m + i] = alpha[i] - lambda - 1e-12 * scale;
      if (i + 1 < m) {
        a[static_cast<std::size_t>(i) * m + i + 1] = beta[i];
        a[static_cast<std::size_t>(i + 1) * m + i] = beta[i];
      }
    }
    std::vector<double> v = y;
    for (int col = 0; col < m; ++col) {
      int piv = col;
      for (int r = col + 1; r < m; ++r)
        if (std::abs(a[static_cast<std::size_t>(r) * m + col]) >
            std::abs(a[static_cast<std::size_t>(piv) * m + col]))
          piv = r;
      for (int c = 0; c < m; ++c)
        std::swap(a[static_cast<std::size_t>(col) * m + c],
                  a[static_cast<std::size_t>(piv) * m + c]);
      std::swap(v[col], v[piv]);
      double d = a[static_cast<std::size_t>(col) * m + col];
      if (d == 0.0) d = 1e-300;
      for (int r = col + 1; r < m; ++r) {
        const double f = a[static_cast<std::size_t>(r) * m + col] / d;
        if (f == 0.0) continue;
        for (int c = col; c < m; ++c)
          a[static_cast<std::size_t>(r) * m + c] -= f * a[static_cast<std::size_t>(col) * m + c];
        v[r] -= f * v[col];
      }
    }
    for (int r = m - 1; r >= 0; --r) {
      double acc = v[r];
      for (int c = r + 1; c < m; ++c) acc -= a[static_cast<std::size_t>(r) * m + c] * v[c];
      double d = a[static_cast<std::size_t>(r) * m + r];
      if (d == 0.0) d = 1e-300;
      v[r] = acc / d;
    }
    double nv = 0.0;
    for (double t : v) nv += t * t;
    nv = std::sqrt(nv);
    for (auto& t : v) t /= nv;
    y = v;
  }
  return y;
}

}  // namespace

EdResult ed_ground_state(int n_sites, const std::vector<std::pair<int, int>>& bonds,
                         double J, double gamma_x) {
  check_ed_size(n_sites);
  const std::size_t dim = std::size_t{1} << n_sites;
  const std::vector<double> diag = diagonal_terms(n_sites, bonds, J);

  EdResult res;
  if (gamma_x == 0.0) {
    // Classical limit: the ground state is the lowest diagonal entry.
    std::size_t best = 0;
    for (std::size_t z = 1; z < dim; ++z)
      if (diag[z] < diag[best]) best = z;
    res.energy = diag[best];
    res.ground.assign(dim, 0.0);
    res.ground[best] = 1.0;
    return res;
  }

  // Restarted Lanczos.  The flat positive start vector overlaps the
  // Perron-Frobenius ground state of this stoquastic Hamiltonian.
  const int m_max = static_cast<int>(std::min<std::size_t>(60, dim));
  std::vector<double> v(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
  double rq_prev = 1e300;
  int stable_cycles = 0;

  std::vector<std::vector<double>> basis;
  std::vector<double> w(dim);
  for (int cycle = 0; cycle < 400; ++cycle) {
    basis.clear();
    std::vector<double> alpha, beta;
    basis.push_back(v);
    for (int k = 0; k < m_max; ++k) {
      apply_hamiltonian(n_sites, diag, gamma_x, basis[k], w);
      ++res.matvecs;
      alpha.push_back(dot(basis[k], w));
      for (std::size_t z = 0; z < dim; ++z) w[z] -= alpha[k] * basis[k][z];
      if (k > 0)
        for (std::size_t z = 0; z < dim; ++z) w[z] -= beta[k - 1] * basis[k - 1][z];
      // Full reorthogonalization, two passes.
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : basis) {
          const double c = dot(q, w);
          for (std::size_t z = 0; z < dim; ++z) w[z] -= c * q[z];
        }
      const double b = norm(w);
      if (b < 1e-12 * (std::abs(alpha[k]) + 1.0)) break;  // invariant subspace
      if (k + 1 == m_max) break;
      beta.push_back(b);
      for (auto& x : w) x /= b;
      basis.push_back(w);
    }
    const double lambda = tridiag_smallest(alpha, beta);
    const std::vector<double> y =
        tridiag_eigenvector(alpha, beta, lambda);
    std::fill(v.begin(), v.end(), 0.0);
    for (std::size_t k = 0; k < basis.size(); ++k)
      for (std::size_t z = 0; z < dim; ++z) v[z] += y[k] * basis[k][z];
    const double nv = norm(v);
    for (auto& x : v) x /= nv;

    if (std::abs(lambda - rq_prev) < 1e-12 * std::max(1.0, std::abs(lambda))) {
      if (++stable_cycles >= 2) {
        // Fix the overall sign: the stoquastic ground state is positive.
        double mass = 0.0;
        for (double x : v) mass += x;
        if (mass < 0.0)
          for (auto& x : v) x = -x;
        res.energy = lambda;
        res.ground = v;
        return res;
      }
    } else {
      stable_cycles = 0;
    }
    rq_prev = lambda;
  }
  throw numerical_error("ground-state iteration did not settle");
}

double ed_ground_energy(int n_sites, const std::vector<std::pair<int, int>>& bonds,
                        double J, double gamma_x) {
  return ed_ground_state(n_sites, bonds, J, gamma_x).energy;
}

namespace {

constexpr int kMaxAuxUnits = 20;

// Spin value of bit b in mask: set <=> +1.
inline int mask_spin(std::size_t mask, int b) { return (mask >> b) & 1 ? 1 : -1; }

}  // namespace

double brute_marginal(const Topology& topo, const ModelParameters& params,
                      std::span<const std::int8_t> visible) {
  const int n_aux = topo.n_hidden + topo.n_deep;
  if (n_aux > kMaxAuxUnits)
    throw config_error("brute-force marginal limited to " +
                       std::to_string(kMaxAuxUnits) + " auxiliary units, got " +
                       std::to_string(n_aux));

  // Everything below works off the raw arrays and edge lists only.
  double visible_term = 0.0;
  for (int i = 0; i < topo.n_visible; ++i)
    visible_term += params.visible_bias[i] * visible[i];

  // Per-hidden field from the clamped visibles, biases folded in.
  std::vector<double> h_field(params.hidden_bias);
  for (std::size_t e = 0; e < topo.vh_edge_count; ++e) {
    auto [i, jnode] = topo.graph.edges[e];
    h_field[jnode - topo.n_visible] += params.vh_weights[e] * visible[i];
  }

  // Hidden-deep couplings as local index pairs.
  std::vector<std::pair<int, int>> hd;
  hd.reserve(topo.graph.edges.size() - topo.vh_edge_count);
  for (std::size_t e = topo.vh_edge_count; e < topo.graph.edges.size(); ++e) {
    auto [jnode, lnode] = topo.graph.edges[e];
    hd.emplace_back(jnode - topo.n_visible, lnode - topo.n_visible - topo.n_hidden);
  }

  double total = 0.0;
  const std::size_t n_masks = std::size_t{1} << n_aux;
  for (std::size_t mask = 0; mask < n_masks; ++mask) {
    double s = visible_term;
    for (int j = 0; j < topo.n_hidden; ++j) s += h_field[j] * mask_spin(mask, j);
    for (int l = 0; l < topo.n_deep; ++l)
      s += params.deep_bias[l] * mask_spin(mask, topo.n_hidden + l);
    for (std::size_t e = 0; e < hd.size(); ++e)
      s += params.hd_weights[e] * mask_spin(mask, hd[e].first) *
           mask_spin(mask, topo.n_hidden + hd[e].second);
    total += std::exp(s);  // exp(-E), E = -s
  }
  return total;
}

double exact_ratio(const Topology& topo, const ModelParameters& params,
                   std::span<const std::int8_t> visible, int site) {
  std::vector<std::int8_t> flipped(visible.begin(), visible.end());
  flipped[site] = static_cast<std::int8_t>(-flipped[site]);
  return std::sqrt(brute_marginal(topo, params, flipped) /
                   brute_marginal(topo, params, visible));
}

std::vector<double> exact_visible_distribution(const Topology& topo,
                                               const ModelParameters& params) {
  if (topo.n_visible > 16)
    throw config_error("exhaustive visible distribution limited to 16 spins");
  const std::size_t n_states = std::size_t{1} << topo.n_visible;
  std::vector<double> p(n_states, 0.0);
  std::vector<std::int8_t> v(topo.n_visible);
  double z = 0.0;
  for (std::size_t mask = 0; mask < n_states; ++mask) {
    for (int i = 0; i < topo.n_visible; ++i)
      v[i] = static_cast<std::int8_t>(mask_spin(mask, i));
    p[mask] = brute_marginal(topo, params, v);
    z += p[mask];
  }
  for (auto& x : p) x /= z;
  return p;
}

double exact_variational_energy(const Topology& topo, const ModelParameters& params,
                                const std::vector<std::pair<int, int>>& bonds,
                                double J, double gamma_x) {
  if (topo.n_visible > 16)
    throw config_error("exhaustive variational energy limited to 16 spins");
  const std::size_t n_states = std::size_t{1} << topo.n_visible;
  std::vector<double> weight(n_states);
  std::vector<std::int8_t> v(topo.n_visible);
  for (std::size_t mask = 0; mask < n_states; ++mask) {
    for (int i = 0; i < topo.n_visible; ++i)
      v[i] = static_cast<std::int8_t>(mask_spin(mask, i));
    weight[mask] = brute_marginal(topo, params, v);
  }
  double num = 0.0, den = 0.0;
  for (std::size_t mask = 0; mask < n_states; ++mask) {
    long long aligned = 0;
    for (auto [i, j] : bonds) aligned += mask_spin(mask, i) * mask_spin(mask, j);
    double e_loc = -J * static_cast<double>(aligned);
    for (int i = 0; i < topo.n_visible; ++i)
      e_loc -= gamma_x *
               std::sqrt(weight[mask ^ (std::size_t{1} << i)] / weight[mask]);
    num += weight[mask] * e_loc;
    den += weight[mask];
  }
  return num / den;
}

std::vector<std::pair<int, int>> golden_case_bonds(int n_sites) {
  if (n_sites == 1) return {};
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n_sites))));
  if (side >= 3 && side * side == n_sites) return build_tfim_bonds(side);
  std::vector<std::pair<int, int>> chain;
  for (int i = 0; i + 1 < n_sites; ++i) chain.emplace_back(i, i + 1);
  return chain;
}

std::vector<GoldenCase> golden_cases(int extra_n, double extra_j, double extra_gamma) {
  std::vector<GoldenCase> cases = {
      {"single_site", 1, 1.0, 3.044, 0.0},
      {"chain2", 2, 1.0, 1.0, 0.0},
      {"chain4", 4, 1.0, 2.0, 0.0},
      {"torus3_classical", 9, 1.0, 0.0, 0.0},
      {"torus3_critical", 9, 1.0, 3.044, 0.0},
      {"torus3_polarized", 9, 1.0, 20.0, 0.0},
  };
  if (extra_n > 0) {
    char id[64];
    std::snprintf(id, sizeof id, "custom_n%d_g%g", extra_n, extra_gamma);
    cases.push_back({id, extra_n, extra_j, extra_gamma, 0.0});
  }
  for (auto& c : cases)
    c.energy = ed_ground_energy(c.n_sites, golden_case_bonds(c.n_sites), c.J, c.gamma_x);
  return cases;
}

void write_golden_csv(const std::vector<GoldenCase>& cases, std::ostream& out) {
  out << "case_id,N,J,gamma,E0\n";
  char line[256];
  for (const auto& c : cases) {
    std::snprintf(line, sizeof line, "%s,%d,%.12g,%.12g,%.12g\n", c.id.c_str(),
                  c.n_sites, c.J, c.gamma_x, c.energy);
    out << line;
  }
}

}  // namespace pnqs
