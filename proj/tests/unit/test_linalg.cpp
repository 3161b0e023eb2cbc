#include <doctest.h>

#include <cmath>
#include <random>

#include "foldtn/errors.hpp"
#include "foldtn/linalg.hpp"

using namespace foldtn;

namespace {

ComplexMatrix random_matrix(std::mt19937_64& rng, Index r, Index c) {
  std::normal_distribution<double> nd;
  return ComplexMatrix::NullaryExpr(r, c, [&] { return cplx(nd(rng), nd(rng)); });
}

ComplexMatrix taylor_exp(const ComplexMatrix& m) {
  // scaling and squaring around a long Taylor series
  int squarings = 0;
  double n = m.cwiseAbs().rowwise().sum().maxCoeff();
  while (n > 0.25) {
    n /= 2;
    ++squarings;
  }
  const ComplexMatrix a = m / std::pow(2.0, squarings);
  ComplexMatrix term = ComplexMatrix::Identity(m.rows(), m.cols()), sum = term;
  for (int k = 1; k < 40; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  for (int k = 0; k < squarings; ++k) sum = sum * sum;
  return sum;
}

ComplexMatrix projector(const ComplexMatrix& q) { return q * (q.adjoint() * q).inverse() * q.adjoint(); }

}  // namespace

TEST_CASE("svd reconstructs and orders values") {
  std::mt19937_64 rng(1);
  const ComplexMatrix m = random_matrix(rng, 8, 5);
  const linalg::Svd f = linalg::svd(m);
  CHECK(linalg::max_abs(f.u * f.s.cast<cplx>().asDiagonal() * f.v - m) <= 1e-12 * linalg::max_abs(m) * 10);
  CHECK(linalg::max_abs(f.u.adjoint() * f.u - ComplexMatrix::Identity(5, 5)) < 1e-12);
  CHECK(linalg::max_abs(f.v * f.v.adjoint() - ComplexMatrix::Identity(5, 5)) < 1e-12);
  for (Index i = 1; i < f.s.size(); ++i) CHECK(f.s(i) <= f.s(i - 1));

  const linalg::Svd id = linalg::svd(ComplexMatrix::Identity(3, 3));
  CHECK((id.s - RealVector::Ones(3)).norm() < 1e-14);

  ComplexMatrix swapped(2, 2);
  swapped << 0, 0.5, 2, 0;
  const linalg::Svd d = linalg::svd(swapped);
  CHECK(d.s(0) == doctest::Approx(2.0));
  CHECK(d.s(1) == doctest::Approx(0.5));
}

TEST_CASE("svd vectors stay orthonormal for strongly graded matrices") {
  std::mt19937_64 rng(4);
  const Index n = 300;
  const ComplexMatrix q1 = linalg::orthonormalize_columns(random_matrix(rng, n, n));
  const ComplexMatrix q2 = linalg::orthonormalize_columns(random_matrix(rng, n, n));
  RealVector s(n);
  for (Index k = 0; k < n; ++k) s(k) = std::pow(10.0, -16.0 * double(k) / double(n));
  const ComplexMatrix m = q1 * s.cast<cplx>().asDiagonal() * q2.adjoint();
  const linalg::Svd f = linalg::svd(m);
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  CHECK(linalg::max_abs(f.u.adjoint() * f.u - id) <= linalg::kOrthonormalityTol);
  CHECK(linalg::max_abs(f.v * f.v.adjoint() - id) <= linalg::kOrthonormalityTol);
  CHECK(linalg::max_abs(f.u * f.s.cast<cplx>().asDiagonal() * f.v - m) < 1e-12);
}

TEST_CASE("truncated_svd discarded weight") {
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  m(0, 0) = 0.9;
  m(1, 1) = 0.4;
  m(2, 2) = 0.1;
  const auto t = linalg::truncated_svd(m, 2);
  CHECK(t.s.size() == 2);
  CHECK(t.discarded_weight == doctest::Approx(0.01 / (0.81 + 0.16 + 0.01)).epsilon(1e-12));

  ComplexMatrix tiny = ComplexMatrix::Zero(2, 2);
  tiny(0, 0) = 1.0;
  tiny(1, 1) = 1e-20;
  const auto u = linalg::truncated_svd(tiny, 2, 1e-14);
  CHECK(u.s.size() == 1);
  CHECK(u.discarded_weight < 1e-38);

  CHECK(linalg::truncated_svd(m, 5).discarded_weight == 0.0);
}

TEST_CASE("eigh") {
  ComplexMatrix d = ComplexMatrix::Zero(3, 3);
  d.diagonal() << 3, 1, 2;
  const auto e = linalg::eigh(d);
  CHECK((e.values - Eigen::Vector3d(3, 2, 1)).norm() < 1e-14);

  ComplexMatrix x(2, 2);
  x << 0, 1, 1, 0;
  const auto ex = linalg::eigh(x);
  CHECK(ex.values(0) == doctest::Approx(1.0));
  CHECK(ex.values(1) == doctest::Approx(-1.0));
  CHECK(std::abs(std::abs((*ex.basis)(0, 0)) - std::sqrt(0.5)) < 1e-14);

  std::mt19937_64 rng(2);
  const ComplexMatrix a = random_matrix(rng, 6, 6);
  const ComplexMatrix h = a + a.adjoint();
  const auto eh = linalg::eigh(h);
  const ComplexMatrix& b = *eh.basis;
  CHECK(linalg::max_abs(b * eh.values.cast<cplx>().asDiagonal() * b.adjoint() - h) < 1e-11 * linalg::max_abs(h));
  CHECK(linalg::max_abs(b.adjoint() * b - ComplexMatrix::Identity(6, 6)) < 1e-12);

  CHECK_THROWS_AS(linalg::eigh(a), ContractViolation);
}

TEST_CASE("orthonormalize_columns") {
  std::mt19937_64 rng(3);
  const ComplexMatrix a = random_matrix(rng, 10, 4);
  const ComplexMatrix q = linalg::orthonormalize_columns(a);
  CHECK(linalg::max_abs(q.adjoint() * q - ComplexMatrix::Identity(4, 4)) < 1e-12);
  CHECK(linalg::max_abs(projector(q) - projector(a)) < 1e-10);
  CHECK(linalg::max_abs(projector(linalg::orthonormalize_columns(q)) - projector(q)) < 1e-10);

  ComplexMatrix e(2, 1);
  e << 2, 0;
  const ComplexMatrix qe = linalg::orthonormalize_columns(e);
  CHECK(std::abs(std::abs(qe(0, 0)) - 1.0) < 1e-14);

  ComplexMatrix def(3, 2);
  def << 1, 2, 1, 2, 1, 2;
  CHECK_THROWS_AS(linalg::orthonormalize_columns(def), SingularInputError);
}

TEST_CASE("matrix_exp") {
  CHECK(linalg::max_abs(linalg::matrix_exp(ComplexMatrix::Zero(3, 3)) - ComplexMatrix::Identity(3, 3)) < 1e-15);
  ComplexMatrix z(2, 2);
  z << 1, 0, 0, -1;
  CHECK(linalg::max_abs(linalg::matrix_exp(z, -kI * M_PI) + ComplexMatrix::Identity(2, 2)) < 1e-12);

  std::mt19937_64 rng(4);
  const ComplexMatrix m = random_matrix(rng, 4, 4);
  const ComplexMatrix ref = taylor_exp(m);
  CHECK(linalg::max_abs(linalg::matrix_exp(m) - ref) / linalg::max_abs(ref) < 1e-10);
}

TEST_CASE("psd_sqrt") {
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d.diagonal() << 4, 9;
  const ComplexMatrix r = linalg::psd_sqrt(d);
  CHECK(std::abs(r(0, 0) - 2.0) < 1e-14);
  CHECK(std::abs(r(1, 1) - 3.0) < 1e-14);

  std::mt19937_64 rng(5);
  const ComplexMatrix b = random_matrix(rng, 5, 5);
  const ComplexMatrix m = b.adjoint() * b;
  const ComplexMatrix s = linalg::psd_sqrt(m);
  CHECK(linalg::max_abs(s * s - m) < 1e-10 * linalg::max_abs(m));

  ComplexMatrix neg = ComplexMatrix::Identity(2, 2);
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(linalg::psd_sqrt(neg), NotPsdError);
}

TEST_CASE("von_neumann_entropy") {
  CHECK(linalg::von_neumann_entropy(RealVector::Ones(1)) == 0.0);
  CHECK(linalg::von_neumann_entropy(RealVector::Constant(2, 0.5)) == doctest::Approx(std::log(2.0)));
  CHECK(linalg::von_neumann_entropy(RealVector::Constant(4, 0.25)) == doctest::Approx(std::log(4.0)));
  RealVector bad(2);
  bad << 1.0, -1e-6;
  CHECK_THROWS_AS(linalg::von_neumann_entropy(bad), InvalidSpectrumError);

  std::mt19937_64 rng(6);
  const ComplexMatrix b = random_matrix(rng, 4, 4);
  ComplexMatrix rho = b * b.adjoint();
  rho /= rho.trace();
  const ComplexMatrix u = linalg::orthonormalize_columns(random_matrix(rng, 4, 4));
  const double s1 = linalg::von_neumann_entropy(linalg::eigh(rho));
  const double s2 = linalg::von_neumann_entropy(linalg::eigh(u * rho * u.adjoint()));
  CHECK(std::abs(s1 - s2) < 1e-12);
}

TEST_CASE("row_orthonormalize and kron") {
  std::mt19937_64 rng(7);
  const ComplexMatrix m = random_matrix(rng, 3, 8);
  const auto f = linalg::row_orthonormalize(m);
  CHECK(linalg::max_abs(f.r * f.q - m) < 1e-12);
  CHECK(linalg::max_abs(f.q * f.q.adjoint() - ComplexMatrix::Identity(3, 3)) < 1e-12);

  ComplexMatrix a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 0, 1, 1, 0;
  const ComplexMatrix k = linalg::kron(a, b);
  CHECK(k(0, 1) == cplx(1.0));
  CHECK(k(3, 2) == cplx(4.0));
  CHECK(k(2, 3) == cplx(4.0));
}

TEST_CASE("large BLAS products agree with the unblocked kernel") {
  // catches miscompiled or mis-selected vendor gemm kernels
  for (Index n : {64, 512}) {
    const Eigen::MatrixXd a = Eigen::MatrixXd::Random(n, n), b = Eigen::MatrixXd::Random(n, n);
    const Eigen::MatrixXd prod = a * b;
    CHECK((prod - a.lazyProduct(b)).cwiseAbs().maxCoeff() < 1e-10);
    const ComplexMatrix za = ComplexMatrix::Random(n, n), zb = ComplexMatrix::Random(n, n);
    const ComplexMatrix zprod = za * zb;
    CHECK(linalg::max_abs(zprod - za.lazyProduct(zb)) < 1e-10);
  }
  const linalg::Svd f = linalg::svd(ComplexMatrix::Random(512, 512));
  CHECK(linalg::max_abs(f.u.adjoint() * f.u - ComplexMatrix::Identity(512, 512)) < 1e-12);
}
