#pragma once

// Folding algorithm for the infinite Ising chain: the semi-infinite half of
// the folded space-time network is represented by a transverse MPS over the
// time-ordered horizontal bonds of one column (site k = Trotter step k, local
// dimension 4), grown column by column and truncated either with the
// Hermitian ("normal") or the transpose ("hybrid") Gram evolution.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "foldtn/mps.hpp"
#include "foldtn/spin_models.hpp"

namespace foldtn {

enum class TruncationMethod { normal, hybrid };

const char* to_string(TruncationMethod m);

struct TransverseState {
  MatrixProductState mps;
  std::size_t n_columns_absorbed = 0;
  TruncationMethod method = TruncationMethod::normal;
  /// The represented vector is exp(log_scale) * mps.
  double log_scale = 0.0;
  /// Sum over truncations of the dropped relative weight.
  double discarded_weight = 0.0;

  std::size_t time_steps() const { return mps.size(); }
};

/// One column of the folded network viewed as an MPO acting on the transverse
/// state. Site k maps the left horizontal bond at step k to the right one; the
/// MPO bond is the folded spin between steps k and k+1, closed at the bottom by
/// the initial state and at the top by an observable.
struct ColumnTensorSet {
  MatrixProductOperator column;
};

/// `closure` is the 2x2 operator at the top of the column (identity for the
/// trace).
ColumnTensorSet column_tensors(const IsingParams& p, std::size_t steps, const LocalState& init,
                               const ComplexMatrix& closure);

struct FixedPointPolicy {
  double observable_tol = 1e-6;
  /// Change in the per-column identity ratio that still counts as stationary.
  double overlap_tol = 1e-4;
  std::size_t max_columns = 400;
  std::size_t min_columns = 3;
  /// Consecutive sub-tolerance changes needed to declare a fixed point.
  std::size_t stable_streak = 3;
  /// When > 0, iterate to a fixed point at this bond dimension first and then
  /// continue at the requested one.
  Index warm_start_chi = 0;

  void validate() const;
};

/// Number of Trotter steps in t_total; throws ConfigError unless t_total is a
/// positive multiple of dt to 1e-9.
std::size_t trotter_steps(double t_total, double dt);

/// Exact transverse state for one spin to the left (bond dimension 4).
TransverseState init_transverse(const IsingParams& p, double t_total, const LocalState& init,
                                TruncationMethod method = TruncationMethod::normal);

/// Exact: bond dimensions multiply by 4.
TransverseState adjoin_column(const TransverseState& s, const ColumnTensorSet& c);

/// Brings the state to top-canonical form and moves its norm into log_scale.
TransverseState canonicalize(const TransverseState& s);

/// One step of the Gram recursion across a site. With A_s the site matrices
/// (the transpose of the bond-space maps written A(b_f, b_r) elsewhere):
///   normal:  lam -> sum_s A_s^T lam conj(A_s)   (Hermitian PSD preserving)
///   hybrid:  lam -> sum_s A_s^T lam A_s          (no Hermiticity)
ComplexMatrix evolve_lambda_normal(const ComplexMatrix& lam_b, const SiteTensor& a);
ComplexMatrix evolve_lambda_hybrid(const ComplexMatrix& lam_b, const SiteTensor& a);

/// Lower Gram matrices on every cut for either recursion.
std::vector<ComplexMatrix> lambda_b_profile(const MatrixProductState& s, TruncationMethod method);

/// Basis of the kept subspace on one cut: leading eigenvectors (normal) or
/// leading left singular vectors (hybrid) of lam_b, at most chi of them and
/// none below linalg::kDefaultRelTol relative to the largest.
struct KeptSubspace {
  ComplexMatrix basis;
  double discarded_weight = 0.0;
};
KeptSubspace kept_subspace(const ComplexMatrix& lam_b, Index chi, TruncationMethod method);

/// Both expect a top-canonical state (see canonicalize). Each cut is projected
/// onto its kept subspace using the Gram matrices of the untruncated state.
TransverseState truncate_normal(const TransverseState& s, Index chi);
TransverseState truncate_hybrid(const TransverseState& s, Index chi);
TransverseState truncate(const TransverseState& s, Index chi);

/// Raw network value with a column closed by `op` between `left` and the
/// mirror image of `right`.
cplx evaluate_observable(const TransverseState& left, const TransverseState& right, const IsingParams& p,
                         const LocalState& init, const ComplexMatrix& op);

/// Values of the identity, X and Z closures for the same network, from one
/// contraction.
struct NetworkValues {
  cplx identity{0.0};
  cplx x{0.0};
  cplx z{0.0};

  double x_expect() const { return (x / identity).real(); }
  double z_expect() const { return (z / identity).real(); }
};
NetworkValues evaluate_center(const TransverseState& left, const TransverseState& right, const IsingParams& p,
                              const LocalState& init);

/// Max-over-cuts entropy of the transverse MPS.
double temporal_entropy(const TransverseState& s);

struct ColumnDiagnostic {
  std::size_t column = 0;
  cplx identity_value{0.0};
  cplx identity_ratio{1.0};  // value_I(N) / value_I(N-1); 1 for the first column
  double x_expect = 0.0;
  double z_expect = 0.0;
  double max_entropy = 0.0;
  Index bond_dim = 0;
  double discarded_weight = 0.0;
};

struct FixedPointResult {
  TransverseState state;
  std::vector<ColumnDiagnostic> diagnostics;
  bool converged = false;
  /// First column of the stable streak that established the fixed point.
  std::size_t fixed_point_column = 0;
  double x_expect = 0.0;
  double z_expect = 0.0;
  /// Spread of <X> over the stable streak.
  double fluctuation_band = 0.0;
};

struct RunOptions {
  bool record_entropy = true;
  /// Called after each column; returning false stops the run early.
  std::function<bool(const ColumnDiagnostic&)> on_column;
};

FixedPointResult run_to_fixed_point(const IsingParams& p, double t_total, Index chi, TruncationMethod method,
                                    const LocalState& init, const FixedPointPolicy& policy,
                                    const RunOptions& options = {});

/// |value_I(N+1) / value_I(N) - 1| at the fixed point; nullopt for
/// non-converged runs or fewer than two columns.
std::optional<double> identity_error_per_column(const FixedPointResult& r);

/// Untruncated transverse state of `n_spins` columns in the unfolded contour
/// layout: sites f_1..f_n followed by r_n..r_1, local dimension 2 (the
/// horizontal bond to the right of the last spin). Cut n - 1 separates the
/// forward contour from the return contour.
MatrixProductState unfolded_transverse_state(const IsingParams& p, double t_total, const LocalState& init,
                                             std::size_t n_spins);

/// Exact network value for a finite chain of n_left + 1 + n_right spins with
/// `op` on the extra spin, built from untruncated transverse states.
cplx exact_chain_value(const IsingParams& p, double t_total, const LocalState& init, std::size_t n_left,
                       std::size_t n_right, const ComplexMatrix& op);

}  // namespace foldtn
