#include <doctest.h>

#include <cmath>
#include <random>

#include "foldtn/errors.hpp"
#include "foldtn/transverse.hpp"
#include "frozen.hpp"
#include "oracles.hpp"

using namespace foldtn;

namespace {

const SpinOps kOps = spin_ops();

// Reverses the qubit order of a 2^n index.
Index reverse_bits(Index x, int n) {
  Index r = 0;
  for (int k = 0; k < n; ++k) r = (r << 1) | ((x >> k) & 1);
  return r;
}

TransverseState grow_untruncated(const IsingParams& p, double t, const LocalState& init, std::size_t columns,
                                 TruncationMethod method) {
  TransverseState s = canonicalize(init_transverse(p, t, init, method));
  const ColumnTensorSet c = column_tensors(p, s.time_steps(), init, kOps.id);
  for (std::size_t k = 1; k < columns; ++k) s = truncate(canonicalize(adjoin_column(s, c)), 1 << 20);
  return s;
}

}  // namespace

TEST_CASE("trotter_steps validates the time grid") {
  CHECK(trotter_steps(2.0, 0.1) == 20);
  CHECK(trotter_steps(10.6, 0.1) == 106);
  CHECK_THROWS_AS(trotter_steps(0.25, 0.1), ConfigError);
  CHECK_THROWS_AS(trotter_steps(0.0, 0.1), ConfigError);
}

TEST_CASE("initial transverse state") {
  const IsingParams p;
  const TransverseState s = init_transverse(p, 0.5, LocalState::x_plus());
  CHECK(s.time_steps() == 5);
  CHECK(s.mps.max_bond_dim() == 4);
  CHECK(s.mps.sites.front().phys() == 4);

  IsingParams free = p;
  free.j_coupling = 0.0;
  const TransverseState f = canonicalize(init_transverse(free, 0.5, LocalState::x_minus()));
  CHECK(temporal_entropy(f) < 1e-12);
}

TEST_CASE("adjoin_column multiplies bond dimensions by four") {
  const IsingParams p;
  const TransverseState s = init_transverse(p, 0.4, LocalState::x_plus());
  const TransverseState g = adjoin_column(s, column_tensors(p, 4, LocalState::x_plus(), kOps.id));
  for (std::size_t k = 0; k + 1 < s.mps.size(); ++k) CHECK(g.mps.bond_dim(k) == 4 * s.mps.bond_dim(k));
  CHECK(g.n_columns_absorbed == s.n_columns_absorbed + 1);
  CHECK_THROWS_AS(adjoin_column(s, column_tensors(p, 3, LocalState::x_plus(), kOps.id)), ShapeError);
}

TEST_CASE("untruncated chains equal the dense network") {
  const IsingParams p;
  for (const LocalState& init : {LocalState::x_plus(), LocalState::x_minus()})
    for (int steps = 1; steps <= 3; ++steps)
      for (std::size_t nl = 1; nl <= 2; ++nl)
        for (std::size_t nr = 1; nr + nl <= 4; ++nr)
          for (const ComplexMatrix& op : {kOps.id, kOps.sx, kOps.sz}) {
            const cplx net = exact_chain_value(p, steps * p.dt, init, nl, nr, op);
            const cplx dense = oracle::dense_network_value(p, int(nl + nr + 1), steps, init, op, int(nl));
            CHECK(std::abs(net - dense) < 1e-10);
          }
}

TEST_CASE("center evaluation agrees with explicit sandwiching") {
  const IsingParams p;
  const LocalState init = LocalState::x_minus();
  for (auto method : {TruncationMethod::normal, TruncationMethod::hybrid}) {
    const TransverseState s = grow_untruncated(p, 0.3, init, 2, method);
    const NetworkValues v = evaluate_center(s, s, p, init);
    CHECK(std::abs(v.identity - evaluate_observable(s, s, p, init, kOps.id)) < 1e-12);
    CHECK(std::abs(v.x - evaluate_observable(s, s, p, init, kOps.sx)) < 1e-12);
    CHECK(std::abs(v.z - evaluate_observable(s, s, p, init, kOps.sz)) < 1e-12);
    const cplx dense_x = oracle::dense_network_value(p, 5, 3, init, kOps.sx, 2);
    CHECK(std::abs(v.x / v.identity - dense_x) < 1e-10);
    CHECK(std::abs(v.identity - 1.0) < 1e-10);
  }
}

TEST_CASE("Gram recursions") {
  std::mt19937_64 rng(21);
  const MatrixProductState s = oracle::random_mps(rng, {1, 3, 5, 4, 1}, 4);
  const auto normal = lambda_b_profile(s, TruncationMethod::normal);
  const auto direct = mps::lower_grams(s);
  for (std::size_t k = 0; k < normal.size(); ++k)
    CHECK(linalg::max_abs(normal[k] - direct[k]) < 1e-10 * linalg::max_abs(direct[k]));

  // hybrid: lam[a, b] = sum over lower configurations psi[a] psi[b]
  const auto hybrid = lambda_b_profile(s, TruncationMethod::hybrid);
  const std::size_t cut = 1;
  ComplexMatrix lam = ComplexMatrix::Zero(s.bond_dim(cut), s.bond_dim(cut));
  for (Index a = 0; a < 4; ++a)
    for (Index b = 0; b < 4; ++b) {
      const Eigen::RowVectorXcd psi = s.left.transpose() * s.sites[0].m[std::size_t(a)] * s.sites[1].m[std::size_t(b)];
      lam += psi.transpose() * psi;
    }
  CHECK(linalg::max_abs(hybrid[cut] - lam) < 1e-10 * linalg::max_abs(lam));

  SiteTensor identity;
  identity.m = {ComplexMatrix::Identity(3, 3)};
  const ComplexMatrix h = (ComplexMatrix::Random(3, 3) + ComplexMatrix::Random(3, 3).adjoint()).eval();
  const ComplexMatrix herm = h + h.adjoint();
  CHECK(linalg::max_abs(evolve_lambda_normal(herm, identity) - herm) < 1e-14);
  CHECK(linalg::max_abs(evolve_lambda_hybrid(h, identity) - h) < 1e-14);

  SiteTensor real_set;
  real_set.m = {Eigen::MatrixXd::Random(3, 3).cast<cplx>(), Eigen::MatrixXd::Random(3, 3).cast<cplx>()};
  const Eigen::MatrixXd r = Eigen::MatrixXd::Random(3, 3);
  const ComplexMatrix sym = (r + r.transpose()).cast<cplx>();
  CHECK(linalg::max_abs(evolve_lambda_normal(sym, real_set) - evolve_lambda_hybrid(sym, real_set)) < 1e-13);
}

TEST_CASE("kept subspaces") {
  ComplexMatrix d = ComplexMatrix::Zero(4, 4);
  d.diagonal() << 0.9, 0.1, 1e-18, 0.0;
  const KeptSubspace k = kept_subspace(d, 2, TruncationMethod::normal);
  CHECK(k.basis.cols() == 2);
  CHECK(k.discarded_weight < 1e-17);

  std::mt19937_64 rng(22);
  std::normal_distribution<double> nd;
  const ComplexMatrix b = ComplexMatrix::NullaryExpr(5, 5, [&] { return cplx(nd(rng), nd(rng)); });
  const ComplexMatrix psd = b * b.adjoint();
  const ComplexMatrix pn = kept_subspace(psd, 3, TruncationMethod::normal).basis;
  const ComplexMatrix ph = kept_subspace(psd, 3, TruncationMethod::hybrid).basis;
  CHECK(linalg::max_abs(pn * pn.adjoint() - ph * ph.adjoint()) < 1e-10);

  const ComplexMatrix g = ComplexMatrix::NullaryExpr(4, 4, [&] { return cplx(nd(rng), nd(rng)); });
  const ComplexMatrix kh = kept_subspace(g, 2, TruncationMethod::hybrid).basis;
  const auto e = linalg::eigh(g * g.adjoint());
  const ComplexMatrix top = e.basis->leftCols(2);
  CHECK(linalg::max_abs(kh * kh.adjoint() - top * top.adjoint()) < 1e-10);
}

TEST_CASE("truncation") {
  const IsingParams p;
  const LocalState init = LocalState::x_plus();
  TransverseState s = grow_untruncated(p, 0.6, init, 2, TruncationMethod::normal);
  s = canonicalize(adjoin_column(s, column_tensors(p, s.time_steps(), init, kOps.id)));
  const ComplexVector before = mps::to_dense(s.mps);
  for (auto method : {TruncationMethod::normal, TruncationMethod::hybrid}) {
    s.method = method;
    const TransverseState same = truncate(s, 1 << 20);
    const ComplexVector after = mps::to_dense(same.mps);
    CHECK(std::abs(std::abs(before.dot(after)) / (before.norm() * after.norm()) - 1.0) < 1e-12);

    const TransverseState cut = truncate(s, 4);
    CHECK(cut.mps.max_bond_dim() <= 4);
    CHECK(cut.discarded_weight > 0.0);
    const NetworkValues exact = evaluate_center(s, s, p, init);
    const NetworkValues approx = evaluate_center(cut, cut, p, init);
    CHECK(std::abs(approx.x_expect() - exact.x_expect()) < 10.0 * std::sqrt(cut.discarded_weight));
  }
}

TEST_CASE("fixed point iteration") {
  IsingParams free;
  free.j_coupling = 0.0;
  FixedPointPolicy policy;
  const FixedPointResult f = run_to_fixed_point(free, 0.5, 8, TruncationMethod::hybrid, LocalState::x_plus(), policy);
  CHECK(f.converged);
  CHECK(f.fixed_point_column == 1);

  const IsingParams p;
  const FixedPointResult u = run_to_fixed_point(p, 0.2, 64, TruncationMethod::normal, LocalState::x_minus(), policy);
  REQUIRE(u.converged);
  REQUIRE(identity_error_per_column(u).has_value());
  CHECK(*identity_error_per_column(u) <= 1e-12);

  for (auto [init, ref] : {std::pair{LocalState::x_plus(), frozen::kCircuitX_t2_xplus},
                           std::pair{LocalState::x_minus(), frozen::kCircuitX_t2_xminus}}) {
    const FixedPointResult r = run_to_fixed_point(p, 2.0, 32, TruncationMethod::hybrid, init, policy);
    CHECK(r.converged);
    CHECK(std::abs(r.x_expect - ref) < 1e-4);
    CHECK(r.fluctuation_band < 1e-5);
  }

  FixedPointPolicy tiny = policy;
  tiny.max_columns = 2;
  tiny.min_columns = 1;
  const FixedPointResult nc = run_to_fixed_point(p, 1.0, 8, TruncationMethod::normal, LocalState::x_plus(), tiny);
  CHECK_FALSE(nc.converged);
  CHECK_FALSE(identity_error_per_column(nc).has_value());

  FixedPointPolicy warm = policy;
  warm.warm_start_chi = 8;
  const FixedPointResult w = run_to_fixed_point(p, 1.0, 16, TruncationMethod::hybrid, LocalState::x_plus(), warm);
  const FixedPointResult c = run_to_fixed_point(p, 1.0, 16, TruncationMethod::hybrid, LocalState::x_plus(), policy);
  CHECK(w.converged);
  CHECK(std::abs(w.x_expect - c.x_expect) < 1e-5);

  FixedPointPolicy bad = policy;
  bad.observable_tol = 0.0;
  CHECK_THROWS_AS(run_to_fixed_point(p, 1.0, 8, TruncationMethod::normal, LocalState::x_plus(), bad), ConfigError);
}

TEST_CASE("unfolded transverse state carries the discrete Gram matrix") {
  IsingParams p;
  p.dt = 0.05;
  const int n_spins = 3, steps = 6;
  const LocalState init = LocalState::x_minus();
  const MatrixProductState s = unfolded_transverse_state(p, steps * p.dt, init, n_spins);
  REQUIRE(s.size() == std::size_t(2 * steps));
  const ComplexMatrix lam_mps = mps::lower_grams(s)[std::size_t(steps - 1)];

  // rho <- cos(J dt) V rho V^dag + |sin(J dt)| W rho W^dag, V = G B G, W = G B Z_N G
  const ComplexMatrix g = linalg::matrix_exp(oracle::field_part(p, n_spins), -kI * p.dt / 2.0);
  const ComplexMatrix b = linalg::matrix_exp(oracle::bond_part(p, n_spins), -kI * p.dt);
  const ComplexMatrix v = g * b * g;
  const ComplexMatrix w = g * b * oracle::embed(oracle::pauli_z(), n_spins - 1, n_spins) * g;
  const ComplexVector psi0 = oracle::product_vector(init, n_spins);
  ComplexMatrix rho = psi0 * psi0.adjoint();
  const double x = p.j_coupling * p.dt;
  for (int k = 0; k < steps; ++k) rho = std::cos(x) * v * rho * v.adjoint() + std::abs(std::sin(x)) * w * rho * w.adjoint();

  const Index d = Index(1) << n_spins;
  REQUIRE(lam_mps.rows() == d);
  double worst = 0.0;
  for (Index a = 0; a < d; ++a)
    for (Index c = 0; c < d; ++c)
      worst = std::max(worst, std::abs(lam_mps(a, c) - rho(reverse_bits(a, n_spins), reverse_bits(c, n_spins))));
  CHECK(worst < 1e-12);

  const GramPair gp = mps::gram_pair(s, std::size_t(steps - 1));
  CHECK(linalg::max_abs(gp.lambda_t - gp.lambda_b) < 1e-12);
}
