#include <doctest.h>

#include <cmath>

#include "foldtn/errors.hpp"
#include "foldtn/itebd.hpp"
#include "frozen.hpp"
#include "oracles.hpp"

using namespace foldtn;

namespace {

double right_canonical_defect(const std::vector<ComplexMatrix>& b) {
  ComplexMatrix acc = ComplexMatrix::Zero(b.front().rows(), b.front().rows());
  for (const auto& m : b) acc += m * m.adjoint();
  return linalg::max_abs(acc - ComplexMatrix::Identity(acc.rows(), acc.cols()));
}

}  // namespace

TEST_CASE("product unit cell") {
  const InfiniteMPS s = InfiniteMPS::product(LocalState::x_minus());
  s.validate();
  CHECK(measure_site(s, spin_ops().sx) == doctest::Approx(-1.0));
  CHECK(std::abs(measure_site(s, spin_ops().sz)) < 1e-15);
  CHECK(max_bond_entropy(s) == 0.0);
}

TEST_CASE("identity gates leave the state alone") {
  const InfiniteMPS s = InfiniteMPS::product(LocalState::x_plus());
  const ComplexMatrix id = ComplexMatrix::Identity(4, 4);
  const StepResult r = itebd_step(s, id, id, 8);
  CHECK(r.discarded == doctest::Approx(0.0));
  CHECK(measure_site(r.state, spin_ops().sx) == doctest::Approx(1.0));
}

TEST_CASE("steps keep right-canonical form and normalized Schmidt values") {
  const IsingParams p;
  const ItebdGates g = itebd_gates(p);
  InfiniteMPS s = InfiniteMPS::product(LocalState::x_minus());
  for (int k = 0; k < 4; ++k) s = itebd_step(s, g.u_a, g.u_b, 256).state;
  s.validate();
  // singular values below the relative cutoff are dropped and the inverse Schmidt weights amplify them
  CHECK(right_canonical_defect(s.b_a) < 1e-6);
  CHECK(right_canonical_defect(s.b_b) < 1e-6);

  // with truncation the gauge is only restored up to the discarded weight
  double discarded = 0.0;
  for (int k = 0; k < 15; ++k) {
    StepResult r = itebd_step(s, g.u_a, g.u_b, 16);
    discarded += r.discarded;
    s = std::move(r.state);
  }
  CHECK(discarded > 0.0);
  CHECK(right_canonical_defect(s.b_a) < 1e-3);
  CHECK(s.lambda_a.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.lambda_b.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.lambda_a.size() <= 16);
}

TEST_CASE("time series against the dense circuit") {
  const IsingParams p;
  const auto series = run_itebd(p, 2.0, 64, LocalState::x_plus());
  REQUIRE(series.size() == 20);
  CHECK(series.back().t == doctest::Approx(2.0));
  CHECK(std::abs(series.back().x_expect - frozen::kCircuitX_t2_xplus) < 1e-6);
  for (std::size_t k = 1; k < series.size(); ++k) {
    CHECK(series[k].discarded_weight_cum >= series[k - 1].discarded_weight_cum);
    CHECK(series[k].max_entropy >= 0.0);
  }
  const auto minus = run_itebd(p, 2.0, 64, LocalState::x_minus());
  CHECK(std::abs(minus.back().x_expect - frozen::kCircuitX_t2_xminus) < 1e-6);

  // short times: exact against a small dense chain (light cone inside 12 sites)
  const auto short_series = run_itebd(p, 0.4, 16, LocalState::x_plus());
  const auto dense = oracle::circuit_x_series(p, 12, 4, LocalState::x_plus(), 6);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(short_series[std::size_t(k)].x_expect - dense[std::size_t(k)]) < 1e-10);
}

TEST_CASE("invalid inputs") {
  const IsingParams p;
  CHECK_THROWS_AS(run_itebd(p, 2.0, 0, LocalState::x_plus()), ConfigError);
  CHECK_THROWS_AS(run_itebd(p, 0.25, 8, LocalState::x_plus()), ConfigError);
  InfiniteMPS bad = InfiniteMPS::product(LocalState::x_plus());
  bad.lambda_a = RealVector::Ones(2);
  CHECK_THROWS(bad.validate());
}

TEST_CASE("integrable point against the free-fermion solution") {
  IsingParams p;
  p.g_parallel = 0.0;
  p.h_transverse = 1.0;

  const auto dense = oracle::circuit_x_series(p, 8, 12, LocalState::x_plus(), 3);
  const auto majorana = oracle::free_fermion_x_series(p, 8, 12, 3);
  for (std::size_t k = 0; k < dense.size(); ++k) CHECK(std::abs(dense[k] - majorana[k]) < 1e-12);

  const auto exact = oracle::free_fermion_x_series(p, 80, 40, 40);
  const auto series = run_itebd(p, 4.0, 128, LocalState::x_plus());
  double worst = 0.0;
  for (std::size_t k = 0; k < series.size(); ++k) worst = std::max(worst, std::abs(series[k].x_expect - exact[k]));
  CHECK(worst <= 1e-6);
  MESSAGE("max |<X> - free fermion| for t <= 4 at chi = 128: " << worst);
}
