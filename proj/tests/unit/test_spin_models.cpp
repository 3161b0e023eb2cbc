#include <doctest.h>

#include <cmath>

#include "foldtn/errors.hpp"
#include "foldtn/spin_models.hpp"
#include "oracles.hpp"

using namespace foldtn;

namespace {

IsingParams default_params() { return IsingParams{}; }

// Dense two-site gate on sites (i, j) of an n-site register.
ComplexMatrix place_gate(const ComplexMatrix& g, int i, int j, int n) {
  const Index d = Index(1) << n;
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  const Index bi = Index(1) << (n - 1 - i), bj = Index(1) << (n - 1 - j);
  for (Index col = 0; col < d; ++col) {
    const Index in = ((col & bi) ? 2 : 0) + ((col & bj) ? 1 : 0);
    for (Index o = 0; o < 4; ++o) {
      Index row = col & ~bi & ~bj;
      if (o & 2) row |= bi;
      if (o & 1) row |= bj;
      out(row, col) += g(o, in);
    }
  }
  return out;
}

double unitarity_defect(const ComplexMatrix& u) {
  return linalg::max_abs(u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols()));
}

}  // namespace

TEST_CASE("Pauli algebra") {
  const SpinOps o = spin_ops();
  CHECK(linalg::max_abs(o.sz * o.sz - o.id) == 0.0);
  CHECK(linalg::max_abs(o.sx * o.sz + o.sz * o.sx) == 0.0);
  CHECK(o.sx.trace() == cplx(0.0));
  CHECK(o.sz.trace() == cplx(0.0));
}

TEST_CASE("parameter validation names the field") {
  IsingParams p;
  p.dt = -0.1;
  try {
    p.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.field()).find("dt") != std::string::npos);
  }
  CHECK_THROWS_AS(LocalState::from_amplitudes(1.0, 1.0), ConfigError);
}

TEST_CASE("single-site half gate") {
  const IsingParams p = default_params();
  const ComplexMatrix f = single_site_half_gate(p, Contour::forward);
  const ComplexMatrix r = single_site_half_gate(p, Contour::returning);
  CHECK(linalg::max_abs(f * r - ComplexMatrix::Identity(2, 2)) < 1e-12);
  CHECK(unitarity_defect(f) < 1e-12);
  const ComplexMatrix a = p.h_transverse * oracle::pauli_x() + p.g_parallel * oracle::pauli_z();
  CHECK(linalg::max_abs(f - linalg::matrix_exp(a, -kI * p.dt / 2.0)) < 1e-12);

  IsingParams small = p;
  small.dt = 1e-4;
  CHECK(linalg::max_abs(single_site_half_gate(small, Contour::forward) - ComplexMatrix::Identity(2, 2)) <=
        1.2 * std::sqrt(1.05 * 1.05 + 0.25) * small.dt / 2.0);
}

TEST_CASE("bond row MPO equals dense ZZ exponential") {
  const IsingParams p = default_params();
  for (Contour c : {Contour::forward, Contour::returning}) {
    const double sign = c == Contour::forward ? 1.0 : -1.0;
    const ComplexMatrix two = mps::to_dense(bond_row_mpo(p, c).expand(2));
    ComplexMatrix expect = std::cos(0.1) * ComplexMatrix::Identity(4, 4) -
                           kI * sign * std::sin(0.1) * linalg::kron(oracle::pauli_z(), oracle::pauli_z());
    CHECK(linalg::max_abs(two - expect) < 1e-12);
    for (int n = 2; n <= 6; ++n) {
      const ComplexMatrix dense = mps::to_dense(bond_row_mpo(p, c).expand(std::size_t(n)));
      CHECK(linalg::max_abs(dense - linalg::matrix_exp(oracle::bond_part(p, n), -kI * sign * p.dt)) < 1e-12);
    }
  }
  IsingParams off = p;
  off.j_coupling = 0.0;
  CHECK(linalg::max_abs(mps::to_dense(bond_row_mpo(off, Contour::forward).expand(3)) -
                        ComplexMatrix::Identity(8, 8)) < 1e-15);
}

TEST_CASE("Trotter row equals dense second-order step") {
  const IsingParams p = default_params();
  for (Contour c : {Contour::forward, Contour::returning}) {
    const double sign = c == Contour::forward ? 1.0 : -1.0;
    for (int n = 2; n <= 6; ++n) {
      const ComplexMatrix dense = mps::to_dense(trotter_row(p, c).expand(std::size_t(n)));
      CHECK(linalg::max_abs(dense - oracle::trotter_step(p, n, sign)) < 1e-12);
      CHECK(unitarity_defect(dense) < 1e-12);
    }
  }
  CHECK(trotter_row(p, Contour::forward).bond_dim == 2);
}

TEST_CASE("Trotter step is second order") {
  IsingParams p = default_params();
  const double e1 = linalg::max_abs(oracle::trotter_step(p, 4) - oracle::exact_step(p, 4));
  p.dt /= 2.0;
  const double e2 = linalg::max_abs(oracle::trotter_step(p, 4) - oracle::exact_step(p, 4));
  CHECK(e1 / e2 == doctest::Approx(8.0).epsilon(0.1));
}

TEST_CASE("folded row is forward times conjugated return") {
  const IsingParams p = default_params();
  const int n = 3;
  const ComplexMatrix f = mps::to_dense(folded_row(p).expand(n));
  const ComplexMatrix uf = oracle::trotter_step(p, n, 1.0);
  const ComplexMatrix ur = uf.conjugate();
  auto split = [&](Index idx, Index& fwd, Index& ret) {
    fwd = ret = 0;
    for (int k = 0; k < n; ++k) {
      const Index digit = (idx >> (2 * (n - 1 - k))) & 3;
      fwd = 2 * fwd + (digit & 1);
      ret = 2 * ret + (digit >> 1);
    }
  };
  double worst = 0.0;
  for (Index o = 0; o < f.rows(); ++o)
    for (Index i = 0; i < f.cols(); ++i) {
      Index of, orr, inf, inr;
      split(o, of, orr);
      split(i, inf, inr);
      worst = std::max(worst, std::abs(f(o, i) - uf(of, inf) * ur(orr, inr)));
    }
  CHECK(worst < 1e-12);

  IsingParams zero = p;
  zero.j_coupling = zero.h_transverse = zero.g_parallel = 0.0;
  CHECK(linalg::max_abs(mps::to_dense(folded_row(zero).expand(1)) - ComplexMatrix::Identity(4, 4)) < 1e-15);
}

TEST_CASE("folded network of two rows reproduces expectation values") {
  const IsingParams p = default_params();
  const int n = 3;
  const ComplexMatrix f = mps::to_dense(folded_row(p).expand(n));
  for (const LocalState& init : {LocalState::x_plus(), LocalState::x_minus()}) {
    ComplexVector v = ComplexVector::Ones(1);
    for (int k = 0; k < n; ++k) v = linalg::kron(v, folded_state(init));
    v = f * (f * v);
    for (const ComplexMatrix& op : {spin_ops().id, spin_ops().sx, spin_ops().sz}) {
      ComplexVector close = ComplexVector::Ones(1);
      for (int k = 0; k < n; ++k) close = linalg::kron(close, folded_closure(k == 1 ? op : spin_ops().id));
      const cplx folded = close.transpose() * v;
      CHECK(std::abs(folded - oracle::dense_network_value(p, n, 2, init, op, 1)) < 1e-12);
    }
  }
}

TEST_CASE("product states") {
  const SpinOps o = spin_ops();
  const auto xp = LocalState::x_plus().amplitudes, xm = LocalState::x_minus().amplitudes;
  CHECK(std::abs(xp.dot(o.sx * xp) - 1.0) < 1e-15);
  CHECK(std::abs(xm.dot(o.sx * xm) + 1.0) < 1e-15);
  CHECK(std::abs(xp.dot(o.sz * xp)) < 1e-15);
  const MatrixProductState s = product_state(LocalState::x_minus(), 3);
  CHECK(s.max_bond_dim() == 1);
  CHECK(linalg::max_abs(mps::to_dense(s) - oracle::product_vector(LocalState::x_minus(), 3)) < 1e-15);
}

TEST_CASE("iTEBD gates reproduce the Trotter step on rings") {
  const IsingParams p = default_params();
  const ItebdGates g = itebd_gates(p);
  CHECK(unitarity_defect(g.u_a) < 1e-12);
  CHECK(unitarity_defect(g.u_b) < 1e-12);
  for (int n : {2, 4, 6}) {
    const Index d = Index(1) << n;
    ComplexMatrix ua = ComplexMatrix::Identity(d, d), ub = ComplexMatrix::Identity(d, d);
    for (int i = 0; i < n; i += 2) ua = place_gate(g.u_a, i, i + 1, n) * ua;
    for (int i = 1; i < n; i += 2) ub = place_gate(g.u_b, i, (i + 1) % n, n) * ub;
    CHECK(linalg::max_abs(ua * ub - oracle::trotter_step(p, n, 1.0, true)) < 1e-12);
  }
  IsingParams still = p;
  still.dt = 0.0;
  CHECK_THROWS_AS(still.validate(), ConfigError);
  still.dt = 1e-300;
  const ItebdGates id = itebd_gates(still);
  CHECK(linalg::max_abs(id.u_a - ComplexMatrix::Identity(4, 4)) < 1e-15);
}

TEST_CASE("X- evolution is the X+ evolution under h -> -h") {
  // conjugation by prod Z maps X -> -X, leaves Z and ZZ alone
  IsingParams p = default_params();
  IsingParams q = p;
  q.h_transverse = -p.h_transverse;
  const int n = 4;
  for (int steps : {1, 5}) {
    const cplx xm = oracle::dense_network_value(p, n, steps, LocalState::x_minus(), spin_ops().sx, 1);
    const cplx xp = oracle::dense_network_value(q, n, steps, LocalState::x_plus(), spin_ops().sx, 1);
    const cplx zm = oracle::dense_network_value(p, n, steps, LocalState::x_minus(), spin_ops().sz, 1);
    const cplx zp = oracle::dense_network_value(q, n, steps, LocalState::x_plus(), spin_ops().sz, 1);
    CHECK(std::abs(xm + xp) < 1e-12);
    CHECK(std::abs(zm - zp) < 1e-12);
  }
}
