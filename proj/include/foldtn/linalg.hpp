#pragma once

// Dense complex linear algebra used throughout the library. Decompositions go
// through LAPACK; storage and products are Eigen.

#include <complex>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

namespace foldtn {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr cplx kI{0.0, 1.0};

namespace linalg {

/// Singular values below rel_tol * (largest) are treated as zero.
inline constexpr double kDefaultRelTol = 1e-14;
/// Largest |U^dag U - I| or |V V^dag - I| accepted from the fast SVD driver.
inline constexpr double kOrthonormalityTol = 1e-10;

/// Real values in descending order, optionally with eigen/singular vectors as
/// the columns of `basis`.
struct Spectrum {
  RealVector values;
  std::optional<ComplexMatrix> basis;
};

/// m = u * diag(s) * v, with u having orthonormal columns and v orthonormal rows.
struct Svd {
  ComplexMatrix u;
  RealVector s;
  ComplexMatrix v;
};

struct TruncatedSvd {
  ComplexMatrix u;
  RealVector s;
  ComplexMatrix v;
  double discarded_weight = 0.0;  // sum of dropped s^2 over sum of all s^2
};

/// m = r * q where q has orthonormal rows.
struct RowFactorization {
  ComplexMatrix r;
  ComplexMatrix q;
};

Svd svd(const ComplexMatrix& m);

/// Keeps min(chi_max, number of values above rel_tol * s_max) leading triplets.
TruncatedSvd truncated_svd(const ComplexMatrix& m, Index chi_max, double rel_tol = kDefaultRelTol);

/// Hermitian eigendecomposition, values descending. The input is symmetrized;
/// it must be Hermitian to 1e-10 relative.
Spectrum eigh(const ComplexMatrix& h);

/// Orthonormal basis of the column space of a full-column-rank matrix.
ComplexMatrix orthonormalize_columns(const ComplexMatrix& a);

/// exp(scale * m) by scaling and squaring; m need not be Hermitian.
ComplexMatrix matrix_exp(const ComplexMatrix& m, cplx scale = 1.0);

/// Hermitian square root of a positive semidefinite matrix. Small negative
/// eigenvalues (above -1e-8 * |m|) are clipped to zero.
ComplexMatrix psd_sqrt(const ComplexMatrix& m);

/// -sum p ln p in nats after normalizing p to unit sum.
double von_neumann_entropy(const Spectrum& p);
double von_neumann_entropy(const RealVector& p);

/// Householder LQ-type split used by canonicalization sweeps.
RowFactorization row_orthonormalize(const ComplexMatrix& m);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix hermitian_part(const ComplexMatrix& m);
double max_abs(const ComplexMatrix& m);
bool all_finite(const ComplexMatrix& m);

}  // namespace linalg
}  // namespace foldtn
