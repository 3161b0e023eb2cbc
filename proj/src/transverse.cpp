#include "foldtn/transverse.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "foldtn/errors.hpp"

namespace foldtn {

namespace {

// Product transverse state of the open left end: every horizontal bond in the
// end state of the bond MPO.
MatrixProductState open_end(const TrotterRow& row, std::size_t steps) {
  SiteTensor t;
  const ComplexVector& l = row.cell.left;
  for (Index b = 0; b < l.size(); ++b) t.m.push_back(ComplexMatrix::Constant(1, 1, l(b)));
  MatrixProductState s;
  s.sites.assign(steps, t);
  s.left = ComplexVector::Ones(1);
  s.right = ComplexVector::Ones(1);
  return s;
}

void require_reflection_symmetric(const MpoTensor& w) {
  const double scale = std::max(1.0, [&] {
    double m = 0.0;
    for (const auto& op : w.ops) m = std::max(m, linalg::max_abs(op));
    return m;
  }());
  for (Index a = 0; a < w.dl; ++a)
    for (Index b = a + 1; b < w.dr; ++b)
      if (linalg::max_abs(w.op(a, b) - w.op(b, a)) > 1e-13 * scale)
        throw ContractViolation("folded row is not reflection symmetric; the right state cannot reuse the left one");
}

void absorb_norm(TransverseState& s) {
  const cplx n = s.mps.left(0);
  s.log_scale += std::log(std::abs(n));
  s.mps.left(0) = n / std::abs(n);
}

std::size_t checked_cut_count(const MatrixProductState& s) { return s.size() > 0 ? s.size() - 1 : 0; }

TransverseState truncate_with(const TransverseState& s, Index chi, TruncationMethod method) {
  if (chi < 1) throw ConfigError("chi", "must be >= 1");
  TransverseState out = s;
  out.method = method;
  if (s.mps.size() < 2) return out;
  const std::vector<ComplexMatrix> grams = lambda_b_profile(s.mps, method);
  auto& sites = out.mps.sites;
  for (std::size_t c = 0; c < checked_cut_count(s.mps); ++c) {
    const KeptSubspace kept = kept_subspace(grams[c], chi, method);
    out.discarded_weight += kept.discarded_weight;
    if (kept.basis.cols() == grams[c].rows() && kept.discarded_weight == 0.0) continue;
    // psi^T T -> psi^T conj(P) P^T T projects the lower part onto span(P)
    const ComplexMatrix pc = kept.basis.conjugate();
    const ComplexMatrix pt = kept.basis.transpose();
    for (auto& a : sites[c].m) a = (a * pc).eval();
    for (auto& a : sites[c + 1].m) a = (pt * a).eval();
  }
  return out;
}

}  // namespace

const char* to_string(TruncationMethod m) { return m == TruncationMethod::hybrid ? "hybrid" : "normal"; }

void FixedPointPolicy::validate() const {
  if (!(observable_tol > 0.0)) throw ConfigError("policy.observable_tol", "must be positive");
  if (!(overlap_tol > 0.0)) throw ConfigError("policy.overlap_tol", "must be positive");
  if (max_columns < 1) throw ConfigError("policy.max_columns", "must be >= 1");
  if (min_columns > max_columns) throw ConfigError("policy.min_columns", "exceeds max_columns");
  if (stable_streak < 1) throw ConfigError("policy.stable_streak", "must be >= 1");
  if (warm_start_chi < 0) throw ConfigError("policy.warm_start_chi", "must be >= 0");
}

std::size_t trotter_steps(double t_total, double dt) {
  if (!(dt > 0.0) || !std::isfinite(t_total)) throw ConfigError("t", "invalid total time or time step");
  const double ratio = t_total / dt;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(n * dt - t_total) > 1e-9)
    throw ConfigError("t", "total time " + std::to_string(t_total) + " is not a positive multiple of dt");
  return static_cast<std::size_t>(n);
}

ColumnTensorSet column_tensors(const IsingParams& p, std::size_t steps, const LocalState& init,
                               const ComplexMatrix& closure) {
  const TrotterRow row = folded_row(p);
  const MpoTensor& w = row.tensor();
  const Index d = w.d_out();  // folded spin
  const Index b = w.dl;       // folded horizontal bond

  // column tensor at one step: bond (spin below, spin above), operator from
  // the left horizontal bond to the right one
  MpoTensor c(d, d, b, b);
  for (Index lb = 0; lb < b; ++lb)
    for (Index rb = 0; rb < b; ++rb) {
      const ComplexMatrix& op = w.op(lb, rb);
      for (Index below = 0; below < d; ++below)
        for (Index above = 0; above < d; ++above) c.op(below, above)(rb, lb) = op(above, below);
    }

  ColumnTensorSet out;
  out.column.sites.assign(steps, c);
  out.column.left = folded_state(init);
  out.column.right = folded_closure(closure);
  return out;
}

TransverseState init_transverse(const IsingParams& p, double t_total, const LocalState& init,
                                TruncationMethod method) {
  p.validate();
  const std::size_t n = trotter_steps(t_total, p.dt);
  TransverseState s;
  s.method = method;
  s.mps = open_end(folded_row(p), n);
  s = adjoin_column(s, column_tensors(p, n, init, spin_ops().id));
  return s;
}

TransverseState adjoin_column(const TransverseState& s, const ColumnTensorSet& c) {
  if (c.column.size() != s.mps.size())
    throw ShapeError("adjoin_column: column has " + std::to_string(c.column.size()) + " steps, state " +
                     std::to_string(s.mps.size()));
  TransverseState out = s;
  out.mps = mps::apply_mpo(s.mps, c.column);
  ++out.n_columns_absorbed;
  return out;
}

TransverseState canonicalize(const TransverseState& s) {
  TransverseState out = s;
  out.mps = mps::canonicalize_top(s.mps);
  absorb_norm(out);
  return out;
}

ComplexMatrix evolve_lambda_normal(const ComplexMatrix& lam_b, const SiteTensor& a) {
  ComplexMatrix next = ComplexMatrix::Zero(a.right_dim(), a.right_dim());
  for (const auto& m : a.m) next.noalias() += m.transpose() * (lam_b * m.conjugate());
  return linalg::hermitian_part(next);
}

ComplexMatrix evolve_lambda_hybrid(const ComplexMatrix& lam_b, const SiteTensor& a) {
  ComplexMatrix next = ComplexMatrix::Zero(a.right_dim(), a.right_dim());
  for (const auto& m : a.m) next.noalias() += m.transpose() * (lam_b * m);
  return next;
}

std::vector<ComplexMatrix> lambda_b_profile(const MatrixProductState& s, TruncationMethod method) {
  s.validate();
  std::vector<ComplexMatrix> out;
  out.reserve(checked_cut_count(s));
  ComplexMatrix lam = method == TruncationMethod::hybrid ? ComplexMatrix(s.left * s.left.transpose())
                                                         : ComplexMatrix(s.left * s.left.adjoint());
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    lam = method == TruncationMethod::hybrid ? evolve_lambda_hybrid(lam, s.sites[k])
                                             : evolve_lambda_normal(lam, s.sites[k]);
    out.push_back(lam);
  }
  return out;
}

KeptSubspace kept_subspace(const ComplexMatrix& lam_b, Index chi, TruncationMethod method) {
  if (chi < 1) throw ConfigError("chi", "must be >= 1");
  RealVector w;
  ComplexMatrix basis;
  if (method == TruncationMethod::normal) {
    linalg::Spectrum e = linalg::eigh(lam_b);
    w = e.values.cwiseMax(0.0);
    basis = std::move(*e.basis);
  } else {
    linalg::Svd f = linalg::svd(lam_b);
    w = f.s;
    basis = std::move(f.u);
  }
  const double top = w.size() ? w(0) : 0.0;
  Index keep = 0;
  while (keep < w.size() && keep < chi && w(keep) > linalg::kDefaultRelTol * top) ++keep;
  keep = std::max<Index>(keep, 1);
  const double total = w.sum();
  KeptSubspace out;
  out.basis = basis.leftCols(keep);
  out.discarded_weight = total > 0.0 ? w.tail(w.size() - keep).sum() / total : 0.0;
  return out;
}

TransverseState truncate_normal(const TransverseState& s, Index chi) {
  return truncate_with(s, chi, TruncationMethod::normal);
}

TransverseState truncate_hybrid(const TransverseState& s, Index chi) {
  return truncate_with(s, chi, TruncationMethod::hybrid);
}

TransverseState truncate(const TransverseState& s, Index chi) { return truncate_with(s, chi, s.method); }

NetworkValues evaluate_center(const TransverseState& left, const TransverseState& right, const IsingParams& p,
                              const LocalState& init) {
  const MatrixProductState& l = left.mps;
  const MatrixProductState& r = right.mps;
  if (l.size() != r.size()) throw ShapeError("evaluate_center: time extents differ");
  l.validate();
  r.validate();
  const TrotterRow row = folded_row(p);
  const MpoTensor& w = row.tensor();
  require_reflection_symmetric(w);
  constexpr Index kD = 4;

  // coefficient c(s, s', A, B) = W(A, B)(s', s): spin s below, s' above
  std::array<cplx, 256> coef{};
  auto at = [](Index s, Index sp, Index a, Index b) { return static_cast<std::size_t>(((s * kD + sp) * kD + a) * kD + b); };
  for (Index a = 0; a < kD; ++a)
    for (Index b = 0; b < kD; ++b)
      for (Index s = 0; s < kD; ++s)
        for (Index sp = 0; sp < kD; ++sp) coef[at(s, sp, a, b)] = w.op(a, b)(sp, s);

  const ComplexVector bottom = folded_state(init);
  const ComplexMatrix start = l.left * r.left.transpose();
  std::array<ComplexMatrix, kD> env;
  for (Index s = 0; s < kD; ++s) env[static_cast<std::size_t>(s)] = bottom(s) * start;

  std::array<ComplexMatrix, kD * kD> m;
  for (std::size_t k = 0; k < l.size(); ++k) {
    const SiteTensor& lt = l.sites[k];
    const SiteTensor& rt = r.sites[k];
    for (Index s = 0; s < kD; ++s)
      for (Index a = 0; a < kD; ++a)
        m[static_cast<std::size_t>(s * kD + a)].noalias() =
            lt.m[static_cast<std::size_t>(a)].transpose() * env[static_cast<std::size_t>(s)];
    std::array<ComplexMatrix, kD> next;
    for (Index sp = 0; sp < kD; ++sp) {
      ComplexMatrix acc = ComplexMatrix::Zero(lt.right_dim(), rt.right_dim());
      for (Index b = 0; b < kD; ++b) {
        ComplexMatrix n = ComplexMatrix::Zero(lt.right_dim(), rt.left_dim());
        for (Index s = 0; s < kD; ++s)
          for (Index a = 0; a < kD; ++a) {
            const cplx c = coef[at(s, sp, a, b)];
            if (c != cplx(0.0)) n += c * m[static_cast<std::size_t>(s * kD + a)];
          }
        acc.noalias() += n * rt.m[static_cast<std::size_t>(b)];
      }
      next[static_cast<std::size_t>(sp)] = std::move(acc);
    }
    env = std::move(next);
  }

  ComplexVector top(kD);
  for (Index s = 0; s < kD; ++s) top(s) = (l.right.transpose() * env[static_cast<std::size_t>(s)] * r.right)(0, 0);
  const cplx scale = std::exp(left.log_scale + right.log_scale);
  const SpinOps o = spin_ops();
  NetworkValues v;
  v.identity = scale * (folded_closure(o.id).transpose() * top)(0, 0);
  v.x = scale * (folded_closure(o.sx).transpose() * top)(0, 0);
  v.z = scale * (folded_closure(o.sz).transpose() * top)(0, 0);
  return v;
}

cplx evaluate_observable(const TransverseState& left, const TransverseState& right, const IsingParams& p,
                         const LocalState& init, const ComplexMatrix& op) {
  const std::size_t n = left.mps.size();
  if (right.mps.size() != n) throw ShapeError("evaluate_observable: time extents differ");
  const ColumnTensorSet center = column_tensors(p, n, init, op);
  const MatrixProductState grown = mps::apply_mpo(left.mps, center.column);
  return std::exp(left.log_scale + right.log_scale) * mps::dot(grown, right.mps);
}

double temporal_entropy(const TransverseState& s) { return s.mps.size() < 2 ? 0.0 : mps::max_entropy(s.mps); }

FixedPointResult run_to_fixed_point(const IsingParams& p, double t_total, Index chi, TruncationMethod method,
                                    const LocalState& init, const FixedPointPolicy& policy,
                                    const RunOptions& options) {
  p.validate();
  policy.validate();
  if (chi < 1) throw ConfigError("chi", "must be >= 1");
  const std::size_t n = trotter_steps(t_total, p.dt);
  const ColumnTensorSet column = column_tensors(p, n, init, spin_ops().id);

  const bool warm = policy.warm_start_chi > 0 && policy.warm_start_chi < chi;
  Index active_chi = warm ? policy.warm_start_chi : chi;

  FixedPointResult res;
  TransverseState s;
  s.method = method;
  s.mps = open_end(folded_row(p), n);

  std::size_t streak = 0;
  for (std::size_t col = 1; col <= policy.max_columns; ++col) {
    s = adjoin_column(s, column);
    s = canonicalize(s);
    s = truncate(s, active_chi);

    const NetworkValues v = evaluate_center(s, s, p, init);
    ColumnDiagnostic d;
    d.column = col;
    d.identity_value = v.identity;
    d.x_expect = v.x_expect();
    d.z_expect = v.z_expect();
    d.bond_dim = s.mps.max_bond_dim();
    d.discarded_weight = s.discarded_weight;
    if (options.record_entropy) d.max_entropy = temporal_entropy(s);
    if (!res.diagnostics.empty()) {
      const ColumnDiagnostic& prev = res.diagnostics.back();
      d.identity_ratio = v.identity / prev.identity_value;
      const bool x_still = std::abs(d.x_expect - prev.x_expect) < policy.observable_tol;
      const bool i_still = std::abs(d.identity_ratio - prev.identity_ratio) < policy.overlap_tol;
      streak = (x_still && i_still) ? streak + 1 : 0;
    }
    res.diagnostics.push_back(d);
    const bool keep_going = !options.on_column || options.on_column(d);

    if (streak >= policy.stable_streak && col >= policy.min_columns) {
      if (active_chi < chi) {
        active_chi = chi;
        streak = 0;
      } else {
        res.converged = true;
        res.fixed_point_column = col - streak;
        break;
      }
    }
    if (!keep_going) break;
  }

  res.state = s;
  const ColumnDiagnostic& last = res.diagnostics.back();
  res.x_expect = last.x_expect;
  res.z_expect = last.z_expect;
  const std::size_t window = std::min<std::size_t>(res.diagnostics.size(), policy.stable_streak + 1);
  double lo = last.x_expect, hi = last.x_expect;
  for (std::size_t i = res.diagnostics.size() - window; i < res.diagnostics.size(); ++i) {
    lo = std::min(lo, res.diagnostics[i].x_expect);
    hi = std::max(hi, res.diagnostics[i].x_expect);
  }
  res.fluctuation_band = hi - lo;
  return res;
}

std::optional<double> identity_error_per_column(const FixedPointResult& r) {
  if (!r.converged || r.diagnostics.size() < 2) return std::nullopt;
  return std::abs(r.diagnostics.back().identity_ratio - 1.0);
}

cplx exact_chain_value(const IsingParams& p, double t_total, const LocalState& init, std::size_t n_left,
                       std::size_t n_right, const ComplexMatrix& op) {
  p.validate();
  const std::size_t n = trotter_steps(t_total, p.dt);
  const ColumnTensorSet column = column_tensors(p, n, init, spin_ops().id);
  auto grow = [&](std::size_t count) {
    TransverseState s;
    s.mps = open_end(folded_row(p), n);
    for (std::size_t i = 0; i < count; ++i) s = adjoin_column(s, column);
    return s;
  };
  return evaluate_observable(grow(n_left), grow(n_right), p, init, op);
}


MatrixProductState unfolded_transverse_state(const IsingParams& p, double t_total, const LocalState& init,
                                             std::size_t n_spins) {
  p.validate();
  if (n_spins < 1) throw ConfigError("n_spins", "must be >= 1");
  const std::size_t n = trotter_steps(t_total, p.dt);
  const TrotterRow fwd = trotter_row(p, Contour::forward);
  const TrotterRow ret = trotter_row(p, Contour::returning);

  // bond = spin between consecutive contour points, operator maps the left
  // horizontal bond to the right one; U and U^dagger rows have the same form
  auto column_site = [](const MpoTensor& w) {
    MpoTensor c(2, 2, 2, 2);
    for (Index lb = 0; lb < 2; ++lb)
      for (Index rb = 0; rb < 2; ++rb)
        for (Index in = 0; in < 2; ++in)
          for (Index out = 0; out < 2; ++out) c.op(in, out)(rb, lb) = w.op(lb, rb)(out, in);
    return c;
  };
  MatrixProductOperator column;
  column.sites.assign(n, column_site(fwd.tensor()));
  column.sites.insert(column.sites.end(), n, column_site(ret.tensor()));
  column.left = init.amplitudes;
  column.right = init.amplitudes.conjugate();

  MatrixProductState s = open_end(fwd, 2 * n);
  for (std::size_t k = 0; k < n_spins; ++k) s = mps::apply_mpo(s, column);
  return s;
}

}  // namespace foldtn
