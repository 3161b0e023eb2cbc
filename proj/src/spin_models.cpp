#include "foldtn/spin_models.hpp"

#include <cmath>

#include "foldtn/errors.hpp"

namespace foldtn {

namespace {

double sign_of(Contour c) { return c == Contour::forward ? -1.0 : 1.0; }

void require_finite(double v, const char* field) {
  if (!std::isfinite(v)) throw ConfigError(field, "must be finite");
}

}  // namespace

void IsingParams::validate() const {
  require_finite(j_coupling, "model.j");
  require_finite(h_transverse, "model.h");
  require_finite(g_parallel, "model.g");
  require_finite(dt, "model.dt");
  if (!(dt > 0.0)) throw ConfigError("model.dt", "must be positive");
}

LocalState LocalState::x_plus() {
  const double r = 1.0 / std::sqrt(2.0);
  return {Eigen::Vector2cd(r, r)};
}

LocalState LocalState::x_minus() {
  const double r = 1.0 / std::sqrt(2.0);
  return {Eigen::Vector2cd(r, -r)};
}

LocalState LocalState::from_amplitudes(cplx up, cplx down) {
  Eigen::Vector2cd v(up, down);
  if (!v.allFinite() || std::abs(v.norm() - 1.0) > 1e-12) throw ConfigError("init", "amplitudes must have unit norm");
  return {v};
}

SpinOps spin_ops() {
  SpinOps o;
  o.sx = ComplexMatrix::Zero(2, 2);
  o.sx(0, 1) = o.sx(1, 0) = 1.0;
  o.sz = ComplexMatrix::Zero(2, 2);
  o.sz(0, 0) = 1.0;
  o.sz(1, 1) = -1.0;
  o.id = ComplexMatrix::Identity(2, 2);
  return o;
}

ComplexMatrix single_site_half_gate(const IsingParams& p, Contour c) {
  const SpinOps o = spin_ops();
  const ComplexMatrix a = p.h_transverse * o.sx + p.g_parallel * o.sz;
  // exp(-i theta n.sigma) = cos(theta) - i sin(theta) n.sigma, |n| = 1
  const double amp = std::hypot(p.h_transverse, p.g_parallel);
  const double theta = amp * p.dt / 2.0;
  if (amp == 0.0) return o.id;
  return std::cos(theta) * o.id + kI * sign_of(c) * std::sin(theta) * (a / amp);
}

MatrixProductOperator TrotterRow::expand(std::size_t n) const {
  MatrixProductOperator out;
  out.sites.assign(n, tensor());
  out.left = cell.left;
  out.right = cell.right;
  return out;
}

TrotterRow bond_row_mpo(const IsingParams& p, Contour c) {
  const SpinOps o = spin_ops();
  const double x = p.j_coupling * p.dt;
  // exp(-/+ i x ZZ) = cos x I I -/+ i sin x Z Z
  const cplx w[2] = {std::cos(x), kI * sign_of(c) * std::sin(x)};
  const cplx root[2] = {std::sqrt(w[0]), std::sqrt(w[1])};
  if (std::abs(w[0]) < 1e-12) throw ConfigError("model.dt", "J*dt too close to pi/2 for the bond MPO");

  MpoTensor t(2, 2, 2, 2);
  for (Index a = 0; a < 2; ++a)
    for (Index b = 0; b < 2; ++b) t.op(a, b) = root[a] * root[b] * ((a + b) % 2 == 0 ? o.id : o.sz);

  TrotterRow row;
  row.cell.sites = {t};
  row.cell.left = ComplexVector::Zero(2);
  row.cell.left(0) = 1.0 / root[0];
  row.cell.right = row.cell.left;
  row.bond_dim = 2;
  return row;
}

TrotterRow trotter_row(const IsingParams& p, Contour c) {
  TrotterRow row = bond_row_mpo(p, c);
  const ComplexMatrix g = single_site_half_gate(p, c);
  for (auto& op : row.cell.sites.front().ops) op = g * op * g;
  return row;
}

TrotterRow folded_row(const IsingParams& p) {
  const TrotterRow fwd = trotter_row(p, Contour::forward);
  const TrotterRow ret = trotter_row(p, Contour::returning);
  const MpoTensor& f = fwd.tensor();
  const MpoTensor& r = ret.tensor();

  MpoTensor t(4, 4, 4, 4);
  for (Index af = 0; af < 2; ++af)
    for (Index ar = 0; ar < 2; ++ar)
      for (Index bf = 0; bf < 2; ++bf)
        for (Index br = 0; br < 2; ++br) t.op(af + 2 * ar, bf + 2 * br) = linalg::kron(r.op(ar, br), f.op(af, bf));

  TrotterRow row;
  row.cell.sites = {t};
  // folded boundary: forward fastest
  row.cell.left = ComplexVector::Zero(4);
  row.cell.right = ComplexVector::Zero(4);
  for (Index bf = 0; bf < 2; ++bf)
    for (Index br = 0; br < 2; ++br) {
      row.cell.left(bf + 2 * br) = fwd.cell.left(bf) * ret.cell.left(br);
      row.cell.right(bf + 2 * br) = fwd.cell.right(bf) * ret.cell.right(br);
    }
  row.bond_dim = 4;
  row.folded = true;
  return row;
}

MatrixProductState product_state(const LocalState& local, std::size_t n) {
  if (n == 0) throw ConfigError("n", "product state needs at least one site");
  SiteTensor t;
  t.m = {ComplexMatrix::Constant(1, 1, local.amplitudes(0)), ComplexMatrix::Constant(1, 1, local.amplitudes(1))};
  MatrixProductState s;
  s.sites.assign(n, t);
  s.left = ComplexVector::Ones(1);
  s.right = ComplexVector::Ones(1);
  return s;
}

ComplexVector folded_state(const LocalState& local) {
  ComplexVector v(4);
  for (Index sf = 0; sf < 2; ++sf)
    for (Index sr = 0; sr < 2; ++sr) v(sf + 2 * sr) = local.amplitudes(sf) * std::conj(local.amplitudes(sr));
  return v;
}

ComplexVector folded_closure(const ComplexMatrix& op) {
  ComplexVector v(4);
  for (Index sf = 0; sf < 2; ++sf)
    for (Index sr = 0; sr < 2; ++sr) v(sf + 2 * sr) = op(sr, sf);
  return v;
}

ItebdGates itebd_gates(const IsingParams& p) {
  const SpinOps o = spin_ops();
  const ComplexMatrix g = single_site_half_gate(p, Contour::forward);
  const ComplexMatrix gg = linalg::kron(g, g);
  const double x = p.j_coupling * p.dt;
  const ComplexMatrix zz = linalg::kron(o.sz, o.sz);
  const ComplexMatrix bond = std::cos(x) * ComplexMatrix::Identity(4, 4) - kI * std::sin(x) * zz;
  return {gg * bond, bond * gg};
}

}  // namespace foldtn
