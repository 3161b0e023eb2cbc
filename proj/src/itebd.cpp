#include "foldtn/itebd.hpp"

#include <cmath>
#include <iostream>

#include "foldtn/errors.hpp"
#include "foldtn/transverse.hpp"

namespace foldtn {

namespace {

constexpr Index kPhys = 2;

struct BondUpdate {
  std::vector<ComplexMatrix> left, right;
  RealVector lambda;
  double discarded = 0.0;
};

// Two-site update of the pair (x, y) given the Schmidt values to the left of x.
BondUpdate update_bond(const std::vector<ComplexMatrix>& bx, const std::vector<ComplexMatrix>& by,
                       const RealVector& lambda_left, const ComplexMatrix& u, Index chi) {
  const Index dl = bx.front().rows(), dr = by.front().cols();

  // psi[(s, a), (t, c)] = (B_x[s] B_y[t])[a, c], then the gate on (s, t)
  ComplexMatrix pairs[kPhys][kPhys];
  for (Index s = 0; s < kPhys; ++s)
    for (Index t = 0; t < kPhys; ++t) pairs[s][t] = bx[static_cast<std::size_t>(s)] * by[static_cast<std::size_t>(t)];
  ComplexMatrix psi = ComplexMatrix::Zero(kPhys * dl, kPhys * dr);
  for (Index s = 0; s < kPhys; ++s)
    for (Index t = 0; t < kPhys; ++t)
      for (Index si = 0; si < kPhys; ++si)
        for (Index ti = 0; ti < kPhys; ++ti) {
          const cplx g = u(s * kPhys + t, si * kPhys + ti);
          if (g != cplx(0.0)) psi.block(s * dl, t * dr, dl, dr) += g * pairs[si][ti];
        }

  ComplexMatrix theta = psi;
  for (Index s = 0; s < kPhys; ++s) theta.middleRows(s * dl, dl) = lambda_left.cast<cplx>().asDiagonal() * psi.middleRows(s * dl, dl);

  const linalg::TruncatedSvd f = linalg::truncated_svd(theta, chi);
  const double snorm = f.s.norm();
  if (!(snorm > 0.0)) throw DegenerateStateError("itebd_step: two-site state vanished");

  BondUpdate out;
  out.discarded = f.discarded_weight;
  out.lambda = f.s / snorm;
  const ComplexMatrix left = psi * f.v.adjoint() / snorm;
  for (Index s = 0; s < kPhys; ++s) {
    out.left.push_back(left.middleRows(s * dl, dl));
    out.right.push_back(f.v.middleCols(s * dr, dr));
  }
  return out;
}

double site_expectation(const std::vector<ComplexMatrix>& b, const RealVector& lambda_left, const ComplexMatrix& op,
                        double* imag) {
  const RealVector w = lambda_left.cwiseAbs2();
  cplx acc = 0.0;
  for (Index s = 0; s < kPhys; ++s)
    for (Index sp = 0; sp < kPhys; ++sp) {
      if (op(s, sp) == cplx(0.0)) continue;
      const ComplexMatrix& x = b[static_cast<std::size_t>(s)];
      const ComplexMatrix& y = b[static_cast<std::size_t>(sp)];
      // tr(B[s]^dagger diag(w) B[s'])
      acc += op(s, sp) * (x.conjugate().array() * (w.cast<cplx>().asDiagonal() * y).array()).sum();
    }
  *imag = std::max(*imag, std::abs(acc.imag()));
  return acc.real();
}

double bond_entropy(const RealVector& lambda) { return linalg::von_neumann_entropy(RealVector(lambda.cwiseAbs2())); }

}  // namespace

InfiniteMPS InfiniteMPS::product(const LocalState& local) {
  InfiniteMPS s;
  for (Index k = 0; k < kPhys; ++k) s.b_a.push_back(ComplexMatrix::Constant(1, 1, local.amplitudes(k)));
  s.b_b = s.b_a;
  s.lambda_a = RealVector::Ones(1);
  s.lambda_b = RealVector::Ones(1);
  return s;
}

void InfiniteMPS::validate() const {
  if (b_a.size() != kPhys || b_b.size() != kPhys) throw ShapeError("InfiniteMPS: expected two physical values");
  if (b_a[0].rows() != lambda_a.size() || b_a[0].cols() != lambda_b.size() || b_b[0].rows() != lambda_b.size() ||
      b_b[0].cols() != lambda_a.size())
    throw ShapeError("InfiniteMPS: bond dimensions do not match the Schmidt vectors");
  if (!lambda_a.allFinite() || !lambda_b.allFinite()) throw ShapeError("InfiniteMPS: non-finite Schmidt values");
}

StepResult itebd_step(const InfiniteMPS& s, const ComplexMatrix& u_a, const ComplexMatrix& u_b, Index chi) {
  if (chi < 1) throw ConfigError("chi", "must be >= 1");
  s.validate();
  StepResult out;
  out.state = s;
  InfiniteMPS& st = out.state;

  BondUpdate odd = update_bond(st.b_b, st.b_a, st.lambda_b, u_b, chi);
  st.b_b = std::move(odd.left);
  st.b_a = std::move(odd.right);
  st.lambda_a = std::move(odd.lambda);

  BondUpdate even = update_bond(st.b_a, st.b_b, st.lambda_a, u_a, chi);
  st.b_a = std::move(even.left);
  st.b_b = std::move(even.right);
  st.lambda_b = std::move(even.lambda);

  out.discarded = odd.discarded + even.discarded;
  return out;
}

double measure_site(const InfiniteMPS& s, const ComplexMatrix& op) {
  double imag = 0.0;
  const double v =
      0.5 * (site_expectation(s.b_a, s.lambda_a, op, &imag) + site_expectation(s.b_b, s.lambda_b, op, &imag));
  if (imag > 1e-8) std::clog << "warning: measure_site discarded imaginary part " << imag << '\n';
  return v;
}

double max_bond_entropy(const InfiniteMPS& s) { return std::max(bond_entropy(s.lambda_a), bond_entropy(s.lambda_b)); }

std::vector<ItebdSample> run_itebd(const IsingParams& p, double t_max, Index chi, const LocalState& init) {
  p.validate();
  if (chi < 1) throw ConfigError("chi", "must be >= 1");
  const std::size_t steps = trotter_steps(t_max, p.dt);
  const ItebdGates g = itebd_gates(p);
  const SpinOps o = spin_ops();

  InfiniteMPS s = InfiniteMPS::product(init);
  std::vector<ItebdSample> out;
  out.reserve(steps);
  double discarded = 0.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    StepResult r = itebd_step(s, g.u_a, g.u_b, chi);
    s = std::move(r.state);
    discarded += r.discarded;
    out.push_back({static_cast<double>(k) * p.dt, measure_site(s, o.sx), measure_site(s, o.sz), max_bond_entropy(s),
                   discarded});
  }
  return out;
}

}  // namespace foldtn
