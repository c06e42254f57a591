#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pnqs/model.hpp"

namespace pnqs {

// Reference results computed without any of the sampling or wavefunction
// machinery: exact diagonalization of the spin Hamiltonian and brute-force
// marginalization of the network distribution.  Everything here is written
// against the raw parameter arrays so bugs in the model code cannot leak
// into the references.

struct EdResult {
  double energy = 0.0;
  std::vector<double> ground;  // normalized, dimension 2^n_sites
  int matvecs = 0;
};

// Ground state of H = -J sum_bonds sz_i sz_j - gamma_x sum_i sx_i on
// n_sites spins (basis index bit i set <=> spin i up).  Restarted Lanczos
// with full reorthogonalization per cycle; iteration stops once the
// Rayleigh quotient moves by less than 1e-12 per cycle.  n_sites <= 16.
EdResult ed_ground_state(int n_sites, const std::vector<std::pair<int, int>>& bonds,
                         double J, double gamma_x);

double ed_ground_energy(int n_sites, const std::vector<std::pair<int, int>>& bonds,
                        double J, double gamma_x);

// Unnormalized marginal weight of a visible configuration: sum over all
// hidden (and deep) assignments of exp(-E).  Independent summation over the
// raw edge lists; never touches the closed-form amplitudes.
double brute_marginal(const Topology& topo, const ModelParameters& params,
                      std::span<const std::int8_t> visible);

// sqrt(marginal(S with site flipped) / marginal(S)).
double exact_ratio(const Topology& topo, const ModelParameters& params,
                   std::span<const std::int8_t> visible, int site);

// Normalized visible distribution, indexed by bitmask (bit i set <=> spin
// i = +1).  Exhaustive: 2^(n_visible) marginal evaluations.
std::vector<double> exact_visible_distribution(const Topology& topo,
                                               const ModelParameters& params);

// <Psi|H|Psi>/<Psi|Psi> evaluated exhaustively through the brute marginals.
double exact_variational_energy(const Topology& topo, const ModelParameters& params,
                                const std::vector<std::pair<int, int>>& bonds,
                                double J, double gamma_x);

// Golden reference energies for regression fixtures.
struct GoldenCase {
  std::string id;
  int n_sites = 0;
  double J = 1.0;
  double gamma_x = 0.0;
  double energy = 0.0;
};

// Bond set used by a golden case: perfect squares with side >= 3 get the
// periodic lattice, n = 1 gets no bonds, anything else an open chain.
std::vector<std::pair<int, int>> golden_case_bonds(int n_sites);

// The built-in case table (energies computed on the fly), optionally
// extended with one extra (n, J, gamma) row.
std::vector<GoldenCase> golden_cases(int extra_n = 0, double extra_j = 1.0,
                                     double extra_gamma = 0.0);

// CSV with header "case_id,N,J,gamma,E0".
void write_golden_csv(const std::vector<GoldenCase>& cases, std::ostream& out);

}  // namespace pnqs
