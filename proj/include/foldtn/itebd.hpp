#pragma once

#include <vector>

#include "foldtn/spin_models.hpp"

namespace foldtn {

/// Period-2 infinite MPS kept in right-canonical form: the state around an
/// A site reads ... lambda_a B_a lambda_b B_b lambda_a ... with
/// sum_s B[s] B[s]^dagger = I and lambda_a (lambda_b) the Schmidt values on
/// the bond to the left of A (B).
struct InfiniteMPS {
  std::vector<ComplexMatrix> b_a, b_b;
  RealVector lambda_a, lambda_b;

  static InfiniteMPS product(const LocalState& local);
  void validate() const;
};

struct StepResult {
  InfiniteMPS state;
  double discarded = 0.0;
};

/// U_B on the (B, A) bonds, then U_A on the (A, B) bonds, each followed by a
/// truncation to chi. No division by Schmidt values anywhere: the new left
/// tensor is obtained as (U psi) V^dagger rather than lambda^-1 W S.
StepResult itebd_step(const InfiniteMPS& s, const ComplexMatrix& u_a, const ComplexMatrix& u_b, Index chi);

/// Sublattice-averaged <op>.
double measure_site(const InfiniteMPS& s, const ComplexMatrix& op);

/// Largest bond entropy of the two bonds.
double max_bond_entropy(const InfiniteMPS& s);

struct ItebdSample {
  double t = 0.0;
  double x_expect = 0.0;
  double z_expect = 0.0;
  double max_entropy = 0.0;
  double discarded_weight_cum = 0.0;
};

/// One sample after every Trotter step: t_max / dt rows.
std::vector<ItebdSample> run_itebd(const IsingParams& p, double t_max, Index chi, const LocalState& init);

}  // namespace foldtn
