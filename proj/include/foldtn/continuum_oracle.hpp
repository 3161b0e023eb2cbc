#pragma once

// Dense small-N reference for the continuum limit of transverse evolution.
// Spin 1 is the most significant bit of every dense index; S^z_N is the spin
// adjacent to the cut.

#include <vector>

#include "foldtn/mps.hpp"
#include "foldtn/spin_models.hpp"

namespace foldtn::continuum {

inline constexpr int kMaxSpins = 12;

struct DenseOperator {
  ComplexMatrix matrix;
  int n_spins = 0;
};

/// 4^N amplitudes on 2N spins; the left half is spins 1..N.
struct DoubledState {
  ComplexVector vector;
  int n_spins = 0;  // per half
};

/// op on spin `site` (0-based) of an n-spin register.
ComplexMatrix site_operator(const ComplexMatrix& op, int site, int n);

/// Open-chain Ising Hamiltonian on n spins. Throws ScaleError above kMaxSpins.
DenseOperator build_HL(const IsingParams& p, int n);

/// Permutation reversing the spin order.
ComplexMatrix reflection(int n);
DenseOperator reflect(const DenseOperator& h);

/// Result of a Lambda flow: the actual matrix is exp(log_scale) * lambda,
/// with lambda of unit trace.
struct LambdaFlow {
  DenseOperator lambda;
  cplx log_scale{0.0};
};

/// d/dt L = i[L, H] +/- |J| Z_N L Z_N (+ forward, - return). Integrated as the
/// trace-preserving part i[L, H] -/+ (|J|/2)[[L, Z_N], Z_N] with the factor
/// exp(+/-|J| t) restored analytically. Adaptive Dormand-Prince, tolerance 1e-10.
LambdaFlow evolve_lambda_real(const DenseOperator& lam0, const DenseOperator& hl, double j, double t, Contour c);

/// d/dt L = -{L, H} + |J| Z_N L Z_N, integrated in unit chunks with
/// renormalization.
LambdaFlow evolve_lambda_imag(const DenseOperator& lam0, const DenseOperator& hl, double j, double t);

/// Phi = (I x R) vec(L) with vec stacking rows (the row index of L becomes the
/// left half); R reflects the right half so that spin N + 1 is the partner of
/// spin N.
DoubledState to_doubled(const DenseOperator& lam);
DenseOperator from_doubled(const DoubledState& phi);

/// H~ = -i (H x I - I x (H^T)^ref) + |J| Z_N Z_{N+1}; d/dt Phi = H~ Phi is the
/// image of the forward real-time flow. For real symmetric H, H^T = H.
ComplexMatrix doubled_generator(const DenseOperator& hl, double j);

/// Imaginary-time counterpart: d/dtau Phi = -H_d Phi with
/// H_d = H x I + I x (H^T)^ref - |J| Z_N Z_{N+1}.
ComplexMatrix doubled_imag_hamiltonian(const DenseOperator& hl, double j);

/// Unnormalized; the norm is carried by the vector.
DoubledState evolve_doubled(const DoubledState& phi0, const DenseOperator& hl, double j, double t);

/// Entropy of Lambda_t^{1/2} Lambda_b Lambda_t^{1/2} normalized to unit trace.
double temporal_entropy_dense(const DenseOperator& lam_b, const DenseOperator& lam_t);

/// Entanglement entropy of a pure state between its first n_left spins and the rest.
double half_chain_entropy(const ComplexVector& phi, int n_left, int n_right);

struct Insertion {
  double t = 0.0;
  Contour contour = Contour::forward;
};

/// (J dt)^{n/2} <Psi_L^fin| S^z_N(t_n) ... S^z_N(t_1) |Psi_L^ini> with
/// S^z_N(t) = exp(i t H_L) S^z_N exp(-i t H_L). Psi_L^alpha is the first n
/// sites of psi with the bond after site n fixed to alpha. Insertions must be
/// in contour order: forward times increasing, then return times decreasing.
cplx transverse_amplitude(const IsingParams& p, int n, const std::vector<Insertion>& insertions, Index alpha_ini,
                          Index alpha_fin, const MatrixProductState& psi);

/// Trace distance between the normalized forward flow at time t and I / 2^N.
double dephasing_fixed_point_check(const DenseOperator& hl, double j, const DenseOperator& lam0, double t);

/// |psi> <psi| for the product state of n copies of `local`.
DenseOperator product_projector(const LocalState& local, int n);

}  // namespace foldtn::continuum
