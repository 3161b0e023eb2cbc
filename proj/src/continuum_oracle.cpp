#include "foldtn/continuum_oracle.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>

#include "foldtn/errors.hpp"

namespace foldtn::continuum {

namespace {

namespace ode = boost::numeric::odeint;

using OdeState = std::vector<cplx>;
using Rhs = std::function<void(const ComplexMatrix&, ComplexMatrix&)>;

constexpr double kOdeTol = 1e-10;

void check_spins(int n) {
  if (n < 1) throw ConfigError("n", "need at least one spin");
  if (n > kMaxSpins) throw ScaleError("dense oracle limited to " + std::to_string(kMaxSpins) + " spins, got " + std::to_string(n));
}

Index dim_of(int n) { return Index{1} << n; }

// Integrates dX/dt = f(X) for a square or column-shaped matrix X.
ComplexMatrix integrate(const ComplexMatrix& x0, const Rhs& f, double t) {
  if (t == 0.0) return x0;
  const Index rows = x0.rows(), cols = x0.cols();
  OdeState x(x0.data(), x0.data() + x0.size());
  auto system = [&](const OdeState& in, OdeState& out, double) {
    Eigen::Map<const ComplexMatrix> m(in.data(), rows, cols);
    ComplexMatrix d(rows, cols);
    f(m, d);
    out.assign(d.data(), d.data() + d.size());
  };
  try {
    auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<OdeState>>(kOdeTol, kOdeTol);
    ode::integrate_adaptive(stepper, system, x, 0.0, t, std::min(1e-3, std::abs(t)));
  } catch (const std::exception& e) {
    throw IntegrationError(std::string("ODE integration failed: ") + e.what());
  }
  ComplexMatrix out = Eigen::Map<ComplexMatrix>(x.data(), rows, cols);
  if (!out.allFinite()) throw IntegrationError("ODE integration produced non-finite values");
  return out;
}

Index reverse_bits(Index i, int n) {
  Index r = 0;
  for (int k = 0; k < n; ++k) r |= ((i >> k) & 1) << (n - 1 - k);
  return r;
}

void require_same_register(const DenseOperator& a, const DenseOperator& b) {
  if (a.n_spins != b.n_spins || a.matrix.rows() != b.matrix.rows())
    throw ShapeError("dense operators act on different registers");
}

}  // namespace

ComplexMatrix site_operator(const ComplexMatrix& op, int site, int n) {
  check_spins(n);
  if (site < 0 || site >= n) throw ShapeError("site_operator: site out of range");
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int k = 0; k < n; ++k) out = linalg::kron(out, k == site ? op : ComplexMatrix::Identity(2, 2));
  return out;
}

DenseOperator build_HL(const IsingParams& p, int n) {
  check_spins(n);
  p.validate();
  const SpinOps o = spin_ops();
  const ComplexMatrix local = p.h_transverse * o.sx + p.g_parallel * o.sz;
  ComplexMatrix h = ComplexMatrix::Zero(dim_of(n), dim_of(n));
  for (int k = 0; k < n; ++k) h += site_operator(local, k, n);
  for (int k = 0; k + 1 < n; ++k) h += p.j_coupling * site_operator(o.sz, k, n) * site_operator(o.sz, k + 1, n);
  return {h, n};
}

ComplexMatrix reflection(int n) {
  check_spins(n);
  const Index d = dim_of(n);
  ComplexMatrix r = ComplexMatrix::Zero(d, d);
  for (Index i = 0; i < d; ++i) r(reverse_bits(i, n), i) = 1.0;
  return r;
}

DenseOperator reflect(const DenseOperator& h) {
  const ComplexMatrix r = reflection(h.n_spins);
  return {r * h.matrix * r, h.n_spins};
}

LambdaFlow evolve_lambda_real(const DenseOperator& lam0, const DenseOperator& hl, double j, double t, Contour c) {
  require_same_register(lam0, hl);
  const ComplexMatrix& h = hl.matrix;
  const ComplexMatrix z = site_operator(spin_ops().sz, hl.n_spins - 1, hl.n_spins);
  const double sign = c == Contour::forward ? 1.0 : -1.0;
  const double a = std::abs(j);
  const cplx tr0 = lam0.matrix.trace();
  if (std::abs(tr0) < 1e-300) throw DegenerateStateError("evolve_lambda_real: initial Lambda has zero trace");

  // [[L, Z], Z] = 2 (L - Z L Z)
  const Rhs f = [&](const ComplexMatrix& l, ComplexMatrix& d) {
    d = kI * (l * h - h * l) - sign * a * (l - z * l * z);
  };
  LambdaFlow out;
  out.lambda = {integrate(lam0.matrix / tr0, f, t), hl.n_spins};
  out.log_scale = sign * a * t + std::log(tr0);
  return out;
}

LambdaFlow evolve_lambda_imag(const DenseOperator& lam0, const DenseOperator& hl, double j, double t) {
  require_same_register(lam0, hl);
  const ComplexMatrix& h = hl.matrix;
  const ComplexMatrix z = site_operator(spin_ops().sz, hl.n_spins - 1, hl.n_spins);
  const double a = std::abs(j);
  const Rhs f = [&](const ComplexMatrix& l, ComplexMatrix& d) { d = -(l * h + h * l) + a * (z * l * z); };

  ComplexMatrix l = lam0.matrix;
  cplx log_scale = 0.0;
  auto renormalize = [&] {
    const cplx tr = l.trace();
    if (std::abs(tr) < 1e-300) throw DegenerateStateError("evolve_lambda_imag: Lambda lost its trace");
    l /= tr;
    log_scale += std::log(tr);
  };
  renormalize();
  double done = 0.0;
  while (done < t) {
    const double chunk = std::min(1.0, t - done);
    l = integrate(l, f, chunk);
    renormalize();
    done += chunk;
  }
  return {{linalg::hermitian_part(l), hl.n_spins}, log_scale};
}

DoubledState to_doubled(const DenseOperator& lam) {
  const int n = lam.n_spins;
  const Index d = dim_of(n);
  DoubledState phi{ComplexVector(d * d), n};
  for (Index a = 0; a < d; ++a)
    for (Index b = 0; b < d; ++b) phi.vector(a * d + reverse_bits(b, n)) = lam.matrix(a, b);
  return phi;
}

DenseOperator from_doubled(const DoubledState& phi) {
  const int n = phi.n_spins;
  const Index d = dim_of(n);
  if (phi.vector.size() != d * d) throw ShapeError("from_doubled: vector size does not match 2N spins");
  DenseOperator lam{ComplexMatrix(d, d), n};
  for (Index a = 0; a < d; ++a)
    for (Index b = 0; b < d; ++b) lam.matrix(a, b) = phi.vector(a * d + reverse_bits(b, n));
  return lam;
}

ComplexMatrix doubled_generator(const DenseOperator& hl, double j) {
  const int n = hl.n_spins;
  const Index d = dim_of(n);
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const ComplexMatrix r = reflection(n);
  const ComplexMatrix h_ref = r * hl.matrix.transpose() * r;
  const ComplexMatrix zz = linalg::kron(site_operator(spin_ops().sz, n - 1, n), site_operator(spin_ops().sz, 0, n));
  return -kI * (linalg::kron(hl.matrix, id) - linalg::kron(id, h_ref)) + std::abs(j) * zz;
}

ComplexMatrix doubled_imag_hamiltonian(const DenseOperator& hl, double j) {
  const int n = hl.n_spins;
  const Index d = dim_of(n);
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const ComplexMatrix r = reflection(n);
  const ComplexMatrix h_ref = r * hl.matrix.transpose() * r;
  const ComplexMatrix zz = linalg::kron(site_operator(spin_ops().sz, n - 1, n), site_operator(spin_ops().sz, 0, n));
  return linalg::kron(hl.matrix, id) + linalg::kron(id, h_ref) - std::abs(j) * zz;
}

DoubledState evolve_doubled(const DoubledState& phi0, const DenseOperator& hl, double j, double t) {
  if (phi0.n_spins != hl.n_spins || phi0.vector.size() != hl.matrix.rows() * hl.matrix.rows())
    throw ShapeError("evolve_doubled: state does not match the Hamiltonian register");
  const ComplexMatrix g = doubled_generator(hl, j);
  const Rhs f = [&](const ComplexMatrix& x, ComplexMatrix& d) { d = g * x; };
  return {integrate(phi0.vector, f, t), phi0.n_spins};
}

double temporal_entropy_dense(const DenseOperator& lam_b, const DenseOperator& lam_t) {
  require_same_register(lam_b, lam_t);
  return linalg::von_neumann_entropy(mps::schmidt_spectrum({lam_b.matrix, lam_t.matrix}));
}

double half_chain_entropy(const ComplexVector& phi, int n_left, int n_right) {
  const Index dl = dim_of(n_left), dr = dim_of(n_right);
  if (phi.size() != dl * dr) throw ShapeError("half_chain_entropy: vector size does not match the bipartition");
  ComplexMatrix m(dl, dr);
  for (Index a = 0; a < dl; ++a)
    for (Index b = 0; b < dr; ++b) m(a, b) = phi(a * dr + b);
  const RealVector s = linalg::svd(m).s;
  return linalg::von_neumann_entropy(RealVector(s.cwiseAbs2()));
}

cplx transverse_amplitude(const IsingParams& p, int n, const std::vector<Insertion>& insertions, Index alpha_ini,
                          Index alpha_fin, const MatrixProductState& psi) {
  check_spins(n);
  if (n > 10) throw ScaleError("transverse_amplitude limited to 10 spins");
  if (psi.size() < static_cast<std::size_t>(n)) throw ShapeError("transverse_amplitude: psi has fewer than n sites");

  bool on_return = false;
  for (std::size_t k = 0; k < insertions.size(); ++k) {
    const Insertion& x = insertions[k];
    if (x.contour == Contour::returning) {
      if (on_return && !(x.t < insertions[k - 1].t)) throw OrderingError("return insertions must have decreasing times");
      on_return = true;
    } else {
      if (on_return) throw OrderingError("forward insertion after a return insertion");
      if (k > 0 && !(x.t > insertions[k - 1].t)) throw OrderingError("forward insertions must have increasing times");
    }
  }

  auto left_state = [&](Index alpha) {
    MatrixProductState part;
    part.sites.assign(psi.sites.begin(), psi.sites.begin() + n);
    part.left = psi.left;
    const Index d = part.sites.back().right_dim();
    if (alpha < 0 || alpha >= d) throw ShapeError("transverse_amplitude: bond value out of range");
    part.right = ComplexVector::Unit(d, alpha);
    return mps::to_dense(part);
  };

  const DenseOperator hl = build_HL(p, n);
  const ComplexMatrix z = site_operator(spin_ops().sz, n - 1, n);
  const linalg::Spectrum e = linalg::eigh(hl.matrix);
  const ComplexMatrix& b = *e.basis;
  auto heisenberg = [&](double t) {
    const ComplexVector phase = (kI * t * e.values.cast<cplx>()).array().exp();
    const ComplexMatrix u_dag = b * phase.asDiagonal() * b.adjoint();  // exp(i t H)
    return ComplexMatrix(u_dag * z * u_dag.adjoint());
  };

  ComplexVector v = left_state(alpha_ini);
  for (const Insertion& x : insertions) v = heisenberg(x.t) * v;
  const cplx weight = std::pow(cplx(p.j_coupling * p.dt), 0.5 * static_cast<double>(insertions.size()));
  return weight * left_state(alpha_fin).dot(v);
}

double dephasing_fixed_point_check(const DenseOperator& hl, double j, const DenseOperator& lam0, double t) {
  if (j == 0.0) throw ConfigError("j", "dephasing needs a nonzero coupling");
  const LambdaFlow f = evolve_lambda_real(lam0, hl, j, t, Contour::forward);
  const Index d = f.lambda.matrix.rows();
  const ComplexMatrix diff =
      linalg::hermitian_part(f.lambda.matrix) - ComplexMatrix::Identity(d, d) / static_cast<double>(d);
  return 0.5 * linalg::eigh(diff).values.cwiseAbs().sum();
}

DenseOperator product_projector(const LocalState& local, int n) {
  check_spins(n);
  ComplexVector v = ComplexVector::Ones(1);
  for (int k = 0; k < n; ++k) {
    ComplexVector next(v.size() * 2);
    for (Index i = 0; i < v.size(); ++i) next.segment(2 * i, 2) = v(i) * local.amplitudes;
    v = std::move(next);
  }
  return {v * v.adjoint(), n};
}

}  // namespace foldtn::continuum
