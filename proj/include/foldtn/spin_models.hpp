#pragma once

// Ising chain H = sum_i J Z_i Z_{i+1} + g Z_i + h X_i with Pauli operators,
// its second-order Trotter rows and the folded (forward x return) rows used
// by the transverse contraction.

#include <cstddef>

#include "foldtn/mps.hpp"

namespace foldtn {

struct IsingParams {
  double j_coupling = 1.0;
  double h_transverse = -1.05;  // coefficient of X
  double g_parallel = 0.5;      // coefficient of Z
  double dt = 0.1;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct LocalState {
  Eigen::Vector2cd amplitudes;

  static LocalState x_plus();
  static LocalState x_minus();
  /// Throws ConfigError unless the vector has unit norm to 1e-12.
  static LocalState from_amplitudes(cplx up, cplx down);
};

/// Forward contour evolves with exp(-i H dt), the return contour with exp(+i H dt).
enum class Contour { forward, returning };

struct SpinOps {
  ComplexMatrix sx, sz, id;
};

/// Pauli X, Z and the 2x2 identity in the Z eigenbasis (|0> = Z=+1).
SpinOps spin_ops();

/// exp(-/+ i (h X + g Z) dt/2).
ComplexMatrix single_site_half_gate(const IsingParams& p, Contour c);

/// Translation-invariant MPO row stored as a one-site unit cell plus the open
/// boundary vectors that close a finite segment.
struct TrotterRow {
  MatrixProductOperator cell;
  Index bond_dim = 0;
  bool folded = false;

  const MpoTensor& tensor() const { return cell.sites.front(); }
  /// Finite open segment of n sites.
  MatrixProductOperator expand(std::size_t n) const;
};

/// exp(-/+ i J sum Z_i Z_{i+1} dt) as a bond-dimension-2 MPO with bond states
/// {I, Z}. Each site carries the square root of its two bond weights so the
/// tensor is symmetric under exchanging left and right bonds.
TrotterRow bond_row_mpo(const IsingParams& p, Contour c);

/// exp(-/+iA dt/2) exp(-/+iB dt) exp(-/+iA dt/2), bond dimension 2.
TrotterRow trotter_row(const IsingParams& p, Contour c);

/// Forward row tensor (x) return row tensor on the 4-dim folded site, with
/// index s_f + 2 s_r (forward fastest) for both the site and the bond.
TrotterRow folded_row(const IsingParams& p);

/// Uniform bond-dimension-1 MPS; n = 1 is the unit cell of the infinite state.
MatrixProductState product_state(const LocalState& local, std::size_t n);

/// psi (x) conj(psi) on the folded site.
ComplexVector folded_state(const LocalState& local);

/// Closes the fold with an observable: c[s_f + 2 s_r] = op(s_r, s_f), so that
/// c . (phi (x) conj(phi)) = <phi|op|phi>.
ComplexVector folded_closure(const ComplexMatrix& op);

/// Two-site gates with U_A U_B equal to one Trotter step:
///   U_A = (G x G) exp(-i J Z Z dt)   on even bonds
///   U_B = exp(-i J Z Z dt) (G x G)   on odd bonds
struct ItebdGates {
  ComplexMatrix u_a;
  ComplexMatrix u_b;
};
ItebdGates itebd_gates(const IsingParams& p);

}  // namespace foldtn
