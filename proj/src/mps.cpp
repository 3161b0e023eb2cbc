#include "foldtn/mps.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "foldtn/errors.hpp"

namespace foldtn {

namespace {

ComplexVector kron_vec(const ComplexVector& slow, const ComplexVector& fast) {
  ComplexVector out(slow.size() * fast.size());
  for (Index i = 0; i < slow.size(); ++i) out.segment(i * fast.size(), fast.size()) = slow(i) * fast;
  return out;
}

// Columns ordered (s, right bond) with s slow: [A_0 | A_1 | ...].
ComplexMatrix hstack(const SiteTensor& t) {
  const Index dl = t.left_dim(), dr = t.right_dim();
  ComplexMatrix out(dl, t.phys() * dr);
  for (Index s = 0; s < t.phys(); ++s) out.middleCols(s * dr, dr) = t.m[static_cast<std::size_t>(s)];
  return out;
}

// Rows ordered (s, left bond) with s slow.
ComplexMatrix vstack(const SiteTensor& t) {
  const Index dl = t.left_dim(), dr = t.right_dim();
  ComplexMatrix out(t.phys() * dl, dr);
  for (Index s = 0; s < t.phys(); ++s) out.middleRows(s * dl, dl) = t.m[static_cast<std::size_t>(s)];
  return out;
}

}  // namespace

Index MatrixProductState::max_bond_dim() const {
  Index d = 1;
  for (std::size_t k = 0; k + 1 < sites.size(); ++k) d = std::max(d, bond_dim(k));
  return d;
}

void MatrixProductState::validate() const {
  if (sites.empty()) throw ShapeError("MPS has no sites");
  if (left.size() != sites.front().left_dim())
    throw ShapeError("MPS left boundary has dimension " + std::to_string(left.size()) + ", first bond " +
                     std::to_string(sites.front().left_dim()));
  if (right.size() != sites.back().right_dim())
    throw ShapeError("MPS right boundary has dimension " + std::to_string(right.size()) + ", last bond " +
                     std::to_string(sites.back().right_dim()));
  for (std::size_t k = 0; k < sites.size(); ++k) {
    const auto& t = sites[k];
    if (t.m.empty()) throw ShapeError("MPS site " + std::to_string(k) + " has no physical values");
    for (const auto& a : t.m) {
      if (a.rows() != t.left_dim() || a.cols() != t.right_dim())
        throw ShapeError("MPS site " + std::to_string(k) + " has inconsistent matrix shapes");
      if (!a.allFinite()) throw ShapeError("MPS site " + std::to_string(k) + " has non-finite entries");
    }
    if (k + 1 < sites.size() && t.right_dim() != sites[k + 1].left_dim())
      throw ShapeError("MPS bond " + std::to_string(k) + " dimension mismatch");
  }
}

MpoTensor::MpoTensor(Index left, Index right, Index d_out, Index d_in)
    : dl(left), dr(right), ops(static_cast<std::size_t>(left * right), ComplexMatrix::Zero(d_out, d_in)) {}

namespace mps {

MatrixProductState apply_mpo(const MatrixProductState& s, const MatrixProductOperator& o) {
  if (s.size() != o.size())
    throw ShapeError("apply_mpo: state has " + std::to_string(s.size()) + " sites, operator " +
                     std::to_string(o.size()));
  MatrixProductState out;
  out.sites.resize(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const SiteTensor& a = s.sites[k];
    const MpoTensor& w = o.sites[k];
    if (w.d_in() != a.phys())
      throw ShapeError("apply_mpo: physical dimension mismatch at site " + std::to_string(k));
    const Index dl = a.left_dim(), dr = a.right_dim();
    SiteTensor& t = out.sites[k];
    t.m.assign(static_cast<std::size_t>(w.d_out()), ComplexMatrix::Zero(w.dl * dl, w.dr * dr));
    for (Index x = 0; x < w.dl; ++x)
      for (Index y = 0; y < w.dr; ++y) {
        const ComplexMatrix& op = w.op(x, y);
        for (Index so = 0; so < op.rows(); ++so)
          for (Index si = 0; si < op.cols(); ++si) {
            const cplx c = op(so, si);
            if (c == cplx(0.0)) continue;
            t.m[static_cast<std::size_t>(so)].block(x * dl, y * dr, dl, dr) += c * a.m[static_cast<std::size_t>(si)];
          }
      }
  }
  if (o.left.size() != o.sites.front().dl || o.right.size() != o.sites.back().dr)
    throw ShapeError("apply_mpo: operator boundary vectors do not match its bonds");
  out.left = kron_vec(o.left, s.left);
  out.right = kron_vec(o.right, s.right);
  return out;
}

MatrixProductState canonicalize_top(const MatrixProductState& s) {
  s.validate();
  MatrixProductState out = s;
  const std::size_t n = out.size();

  for (auto& a : out.sites.back().m) a = (a * out.right).eval();
  out.right = ComplexVector::Ones(1);

  for (std::size_t k = n - 1; k >= 1; --k) {
    SiteTensor& t = out.sites[k];
    const Index dr = t.right_dim();
    linalg::RowFactorization f = linalg::row_orthonormalize(hstack(t));
    for (Index p = 0; p < t.phys(); ++p) t.m[static_cast<std::size_t>(p)] = f.q.middleCols(p * dr, dr);
    for (auto& a : out.sites[k - 1].m) a = (a * f.r).eval();
  }

  SiteTensor& first = out.sites.front();
  double total = 0.0;
  for (auto& a : first.m) {
    a = (out.left.transpose() * a).eval();
    total += a.squaredNorm();
  }
  const double nrm = std::sqrt(total);
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw DegenerateStateError("canonicalize_top: state has zero norm");
  for (auto& a : first.m) a /= nrm;
  out.left = ComplexVector::Constant(1, nrm);
  return out;
}

std::vector<ComplexMatrix> lower_grams(const MatrixProductState& s) {
  s.validate();
  std::vector<ComplexMatrix> out;
  out.reserve(s.size() - 1);
  ComplexMatrix lam = s.left * s.left.adjoint();
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const SiteTensor& t = s.sites[k];
    ComplexMatrix next = ComplexMatrix::Zero(t.right_dim(), t.right_dim());
    for (const auto& a : t.m) next.noalias() += a.transpose() * (lam * a.conjugate());
    lam = std::move(next);
    out.push_back(lam);
  }
  return out;
}

std::vector<ComplexMatrix> upper_grams(const MatrixProductState& s) {
  s.validate();
  const std::size_t n = s.size();
  std::vector<ComplexMatrix> out(n > 0 ? n - 1 : 0);
  ComplexMatrix lam = s.right.conjugate() * s.right.transpose();
  for (std::size_t k = n - 1; k >= 1; --k) {
    const SiteTensor& t = s.sites[k];
    ComplexMatrix next = ComplexMatrix::Zero(t.left_dim(), t.left_dim());
    for (const auto& a : t.m) next.noalias() += a.conjugate() * (lam * a.transpose());
    lam = std::move(next);
    out[k - 1] = lam;
  }
  return out;
}

GramPair gram_pair(const MatrixProductState& s, std::size_t cut) {
  if (cut + 1 >= s.size())
    throw ShapeError("gram_pair: cut " + std::to_string(cut) + " out of range for " + std::to_string(s.size()) +
                     " sites");
  return {lower_grams(s)[cut], upper_grams(s)[cut]};
}

linalg::Spectrum schmidt_spectrum(const GramPair& g) {
  const ComplexMatrix root = linalg::psd_sqrt(g.lambda_t);
  const ComplexMatrix lam = linalg::hermitian_part(root * g.lambda_b * root);
  linalg::Spectrum e = linalg::eigh(lam);
  RealVector v = e.values.cwiseMax(0.0);
  const double total = v.sum();
  if (!(total > 0.0)) throw InvalidSpectrumError("schmidt_spectrum: Gram product has zero trace");
  return {v / total, std::nullopt};
}

std::vector<double> entropy_profile(const MatrixProductState& s) {
  const auto lower = lower_grams(s);
  const auto upper = upper_grams(s);
  std::vector<double> out;
  out.reserve(lower.size());
  for (std::size_t c = 0; c < lower.size(); ++c)
    out.push_back(linalg::von_neumann_entropy(schmidt_spectrum({lower[c], upper[c]})));
  return out;
}

double max_entropy(const MatrixProductState& s) {
  const auto p = entropy_profile(s);
  return p.empty() ? 0.0 : *std::max_element(p.begin(), p.end());
}

cplx inner(const MatrixProductState& a, const MatrixProductState& b) {
  if (a.size() != b.size()) throw ShapeError("inner: states have different lengths");
  ComplexMatrix env = a.left.conjugate() * b.left.transpose();
  for (std::size_t k = 0; k < a.size(); ++k) {
    const SiteTensor& x = a.sites[k];
    const SiteTensor& y = b.sites[k];
    if (x.phys() != y.phys()) throw ShapeError("inner: physical dimension mismatch at site " + std::to_string(k));
    if (env.rows() != x.left_dim() || env.cols() != y.left_dim()) throw ShapeError("inner: bond mismatch");
    ComplexMatrix next = ComplexMatrix::Zero(x.right_dim(), y.right_dim());
    for (Index p = 0; p < x.phys(); ++p)
      next.noalias() += x.m[static_cast<std::size_t>(p)].adjoint() * (env * y.m[static_cast<std::size_t>(p)]);
    env = std::move(next);
  }
  return (a.right.adjoint() * env * b.right)(0, 0);
}

cplx dot(const MatrixProductState& a, const MatrixProductState& b) {
  if (a.size() != b.size()) throw ShapeError("dot: states have different lengths");
  ComplexMatrix env = a.left * b.left.transpose();
  for (std::size_t k = 0; k < a.size(); ++k) {
    const SiteTensor& x = a.sites[k];
    const SiteTensor& y = b.sites[k];
    if (x.phys() != y.phys()) throw ShapeError("dot: physical dimension mismatch at site " + std::to_string(k));
    if (env.rows() != x.left_dim() || env.cols() != y.left_dim()) throw ShapeError("dot: bond mismatch");
    ComplexMatrix next = ComplexMatrix::Zero(x.right_dim(), y.right_dim());
    for (Index p = 0; p < x.phys(); ++p)
      next.noalias() += x.m[static_cast<std::size_t>(p)].transpose() * (env * y.m[static_cast<std::size_t>(p)]);
    env = std::move(next);
  }
  return (a.right.transpose() * env * b.right)(0, 0);
}

double norm(const MatrixProductState& s) { return std::sqrt(std::max(0.0, inner(s, s).real())); }

TruncationResult truncate_to(const MatrixProductState& s, Index chi) {
  if (chi < 1) throw ContractViolation("truncate_to: chi must be >= 1");
  s.validate();
  TruncationResult res;
  MatrixProductState& out = res.state;
  out.sites.resize(s.size());
  ComplexMatrix carry = s.left.transpose();  // 1 x D0
  for (std::size_t k = 0; k < s.size(); ++k) {
    const SiteTensor& t = s.sites[k];
    SiteTensor absorbed;
    for (const auto& a : t.m) absorbed.m.push_back(carry * a);
    if (k + 1 == s.size()) {
      out.sites[k] = std::move(absorbed);
      break;
    }
    const ComplexMatrix theta = vstack(absorbed);
    const double total = theta.squaredNorm();
    linalg::TruncatedSvd f = linalg::truncated_svd(theta, chi);
    res.error_norm += std::sqrt(f.discarded_weight * total);
    const Index dl = absorbed.left_dim();
    SiteTensor& nt = out.sites[k];
    for (Index p = 0; p < absorbed.phys(); ++p) nt.m.push_back(f.u.middleRows(p * dl, dl));
    carry = f.s.cast<cplx>().asDiagonal() * f.v;
  }
  out.left = ComplexVector::Ones(1);
  out.right = s.right;
  return res;
}

ComplexVector to_dense(const MatrixProductState& s) {
  s.validate();
  ComplexMatrix rows = s.left.transpose();
  for (const auto& t : s.sites) {
    ComplexMatrix next(rows.rows() * t.phys(), t.right_dim());
    for (Index c = 0; c < rows.rows(); ++c)
      for (Index p = 0; p < t.phys(); ++p) next.row(c * t.phys() + p) = rows.row(c) * t.m[static_cast<std::size_t>(p)];
    rows = std::move(next);
  }
  return rows * s.right;
}

ComplexMatrix to_dense(const MatrixProductOperator& o) {
  if (o.sites.empty()) throw ShapeError("to_dense: empty operator");
  std::vector<ComplexMatrix> acc;
  for (Index a = 0; a < o.left.size(); ++a) acc.push_back(ComplexMatrix::Constant(1, 1, o.left(a)));
  for (const auto& w : o.sites) {
    std::vector<ComplexMatrix> next(static_cast<std::size_t>(w.dr),
                                    ComplexMatrix::Zero(acc.front().rows() * w.d_out(), acc.front().cols() * w.d_in()));
    for (Index a = 0; a < w.dl; ++a)
      for (Index b = 0; b < w.dr; ++b)
        next[static_cast<std::size_t>(b)] += linalg::kron(acc[static_cast<std::size_t>(a)], w.op(a, b));
    acc = std::move(next);
  }
  ComplexMatrix out = ComplexMatrix::Zero(acc.front().rows(), acc.front().cols());
  for (Index b = 0; b < o.right.size(); ++b) out += o.right(b) * acc[static_cast<std::size_t>(b)];
  return out;
}

}  // namespace mps
}  // namespace foldtn
