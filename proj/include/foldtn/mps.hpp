#pragma once

#include <cstddef>
#include <vector>

#include "foldtn/linalg.hpp"

namespace foldtn {

/// One site of a matrix product state. `m[s]` is the (left bond x right bond)
/// matrix for physical value s.
struct SiteTensor {
  std::vector<ComplexMatrix> m;

  Index phys() const { return static_cast<Index>(m.size()); }
  Index left_dim() const { return m.empty() ? 0 : m.front().rows(); }
  Index right_dim() const { return m.empty() ? 0 : m.front().cols(); }
};

/// Open-boundary MPS with explicit boundary vectors:
///   psi(s_1..s_n) = left^T A_1[s_1] ... A_n[s_n] right.
/// For transverse states the sites run bottom (first) to top (last) in time.
struct MatrixProductState {
  std::vector<SiteTensor> sites;
  ComplexVector left;
  ComplexVector right;

  std::size_t size() const { return sites.size(); }
  /// Dimension of the bond between site `cut` and `cut + 1`.
  Index bond_dim(std::size_t cut) const { return sites.at(cut).right_dim(); }
  Index max_bond_dim() const;
  /// Throws ShapeError on mismatched bonds or non-finite entries.
  void validate() const;
};

/// One MPO site. `op(a, b)` is the (d_out x d_in) operator carried when the
/// left bond is a and the right bond is b.
struct MpoTensor {
  Index dl = 0, dr = 0;
  std::vector<ComplexMatrix> ops;  // ops[a * dr + b]

  MpoTensor() = default;
  MpoTensor(Index left, Index right, Index d_out, Index d_in);
  ComplexMatrix& op(Index a, Index b) { return ops[static_cast<std::size_t>(a * dr + b)]; }
  const ComplexMatrix& op(Index a, Index b) const { return ops[static_cast<std::size_t>(a * dr + b)]; }
  Index d_out() const { return ops.front().rows(); }
  Index d_in() const { return ops.front().cols(); }
};

/// Open-boundary MPO: O = sum left[a0] W_1(a0,a1) x ... x W_n(a_{n-1},a_n) right[a_n].
struct MatrixProductOperator {
  std::vector<MpoTensor> sites;
  ComplexVector left;
  ComplexVector right;

  std::size_t size() const { return sites.size(); }
};

/// Gram matrices of the bond variables below (first sites) and above a cut.
///   lambda_b[a,b] = sum_c psi_c[a] conj(psi_c[b]),  psi_c from the lower part
///   lambda_t[a,b] = sum_c conj(T_c[a]) T_c[b],       T_c from the upper part
/// With these conventions lambda_t = I is right (top) canonical form and the
/// Schmidt spectrum is that of lambda_t^{1/2} lambda_b lambda_t^{1/2}.
struct GramPair {
  ComplexMatrix lambda_b;
  ComplexMatrix lambda_t;
};

struct TruncationResult {
  MatrixProductState state;
  double error_norm = 0.0;  // sum over bonds of the dropped 2-norm
};

namespace mps {

/// Exact application; bond dimensions multiply. The MPO bond is the slow
/// index of each merged bond.
MatrixProductState apply_mpo(const MatrixProductState& s, const MatrixProductOperator& o);

/// Right-to-left sweep making every upper part an isometry (lambda_t = I on
/// all cuts). Boundary vectors are absorbed; the result has 1-dim boundaries
/// with the norm stored in `left`.
MatrixProductState canonicalize_top(const MatrixProductState& s);

GramPair gram_pair(const MatrixProductState& s, std::size_t cut);

/// Lower Gram matrices on every cut, computed by the sesquilinear transfer
/// lambda -> sum_s A_s^T lambda conj(A_s).
std::vector<ComplexMatrix> lower_grams(const MatrixProductState& s);
std::vector<ComplexMatrix> upper_grams(const MatrixProductState& s);

linalg::Spectrum schmidt_spectrum(const GramPair& g);
std::vector<double> entropy_profile(const MatrixProductState& s);
double max_entropy(const MatrixProductState& s);

/// <a|b>, conjugating a.
cplx inner(const MatrixProductState& a, const MatrixProductState& b);
double norm(const MatrixProductState& s);
/// Bilinear contraction sum_s a(s) b(s), no conjugation.
cplx dot(const MatrixProductState& a, const MatrixProductState& b);

/// Left-to-right SVD sweep keeping at most chi values per bond. Expects `s`
/// in top-canonical form so each SVD sees true Schmidt values.
TruncationResult truncate_to(const MatrixProductState& s, Index chi);

/// Dense vector, first site most significant.
ComplexVector to_dense(const MatrixProductState& s);
ComplexMatrix to_dense(const MatrixProductOperator& o);

}  // namespace mps
}  // namespace foldtn
