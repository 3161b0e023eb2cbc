#pragma once

// Gaussian (Slater determinant) states of spinless fermions on 2N sites,
// evolved under quadratic, possibly non-Hermitian, hopping Hamiltonians.
// Sites are 0..2N-1; the middle bond joins sites N-1 and N.

#include <string>
#include <vector>

#include "foldtn/linalg.hpp"

namespace foldtn::fermion {

enum class Variant { uniform, sign_flipped, decoupled, nonhermitian_tilde };
enum class CouplingForm { imag_hopping, imag_potential };

const char* to_string(Variant v);
const char* to_string(CouplingForm c);
Variant parse_variant(const std::string& s);
CouplingForm parse_coupling_form(const std::string& s);

struct QuadraticHamiltonian {
  ComplexMatrix h;
  bool hermitian = true;
};

struct SlaterMatrix {
  ComplexMatrix a;  // 2N x n_particles, orbitals as columns
};

/// uniform:            +1 hopping on every bond
/// sign_flipped:       +1 on bonds left of the middle, -1 on the middle bond
///                     and every bond to its right
/// decoupled:          +1 hopping with the middle bond removed
/// nonhermitian_tilde: +1 left, -1 right, middle bond replaced by
///                     imag_hopping:   i (c+_{N-1} c_N + c+_N c_{N-1})
///                     imag_potential: i (n_{N-1} + n_N)
QuadraticHamiltonian build_hamiltonian(int n_half, Variant v, CouplingForm c = CouplingForm::imag_hopping);

/// n_particles lowest orbitals of a Hermitian h; ties at the Fermi level are
/// broken by eigensolver order.
SlaterMatrix ground_state_slater(const QuadraticHamiltonian& h, int n_particles);

/// a <- orthonormalize(exp(-i h dt) a), `steps` times, with the propagator
/// formed once.
SlaterMatrix evolve_slater(const SlaterMatrix& a, const QuadraticHamiltonian& h, double dt, int steps);

/// Same, with a precomputed propagator exp(-i h dt).
SlaterMatrix evolve_slater_with(const SlaterMatrix& a, const ComplexMatrix& propagator, int steps);

/// G = A A^dagger (G_ij = <c+_i c_j> up to transposition, which leaves
/// subsystem spectra unchanged).
ComplexMatrix greens_function(const SlaterMatrix& a);

/// Entropy of sites [first, first + count) from the spectrum of G restricted
/// to them.
double entanglement_entropy(const ComplexMatrix& g, Index first, Index count);

struct GrowthSeries {
  Variant variant;
  std::vector<double> t;
  std::vector<double> entropy;
};

/// Middle-cut entropy vs time from the decoupled ground state (N particles),
/// sampled every `sample_every` steps including t = 0.
std::vector<GrowthSeries> growth_study(int n_half, double t_max, double dt, const std::vector<Variant>& variants,
                                       CouplingForm c = CouplingForm::imag_hopping, int sample_every = 1);

}  // namespace foldtn::fermion
