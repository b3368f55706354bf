#include <cmath>
#include <random>

#include "doctest.h"
#include "subfid/errors.hpp"
#include "subfid/linalg.hpp"

using namespace subfid;

namespace {

Tensor diag(std::initializer_list<double> d) {
  Tensor t({d.size(), d.size()});
  std::size_t i = 0;
  for (double x : d) {
    t({i, i}) = x;
    ++i;
  }
  return t;
}

}  // namespace

TEST_CASE("svd_truncate basics") {
  const SvdResult r = svd_truncate(diag({3, 4}), TruncationSpec::unbounded());
  REQUIRE(r.s.size() == 2);
  CHECK(r.s[0] == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(r.s[1] == doctest::Approx(3.0).epsilon(1e-14));

  TruncationSpec spec;
  spec.weight_cutoff = 1e-12;
  const SvdResult t = svd_truncate(diag({1, 1e-9}), spec);
  CHECK(t.s.size() == 1);
  CHECK(t.discarded_weight == doctest::Approx(1e-18).epsilon(1e-6));

  CHECK_THROWS_AS(svd_truncate(Tensor({2, 2, 2}), spec), ArgumentError);
}

TEST_CASE("svd_truncate Eckart-Young") {
  std::mt19937_64 rng(5);
  const Matrix m = linalg::random_gaussian(8, 8, rng);
  const RealVector full = linalg::singular_values(m);
  const linalg::Svd t = linalg::svd_truncate(m, TruncationSpec::rank(4));
  CHECK(t.s.size() == 4);
  const Matrix rec = t.u * t.s.asDiagonal() * t.v.adjoint();
  const double err2 = (m - rec).squaredNorm();
  CHECK(err2 == doctest::Approx(full.tail(4).squaredNorm()).epsilon(1e-12));
  CHECK(t.discarded_weight == doctest::Approx(err2).epsilon(1e-12));
  CHECK(linalg::isometry_residual(t.u) <= 1e-12);
  CHECK(linalg::isometry_residual(t.v) <= 1e-12);

  const linalg::Svd u = linalg::svd_truncate(m, TruncationSpec::unbounded());
  CHECK(max_abs(m - u.u * u.s.asDiagonal() * u.v.adjoint()) <=
        1e-12 * max_abs(m));
}

TEST_CASE("trace norm") {
  CHECK(trace_norm(Tensor::identity(2)) == doctest::Approx(2.0));
  CHECK(trace_norm(diag({3, -4})) == doctest::Approx(7.0));
  std::mt19937_64 rng(7);
  const Matrix m = linalg::random_gaussian(6, 9, rng);
  const linalg::Eig e = linalg::hermitian_eig(m * m.adjoint());
  double ref = 0.0;
  for (double x : e.values) ref += std::sqrt(std::max(x, 0.0));
  CHECK(std::abs(linalg::trace_norm(m) - ref) <= 1e-12 * ref);
}

TEST_CASE("trace norm invariances") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix m = linalg::random_gaussian(5, 7, rng);
    const double t = linalg::trace_norm(m);
    CHECK(std::abs(t - linalg::trace_norm(m.adjoint())) <= 1e-12 * t);
    const Matrix u = linalg::random_unitary(5, rng);
    const Matrix v = linalg::random_unitary(7, rng);
    CHECK(std::abs(t - linalg::trace_norm(u * m * v)) <= 1e-11 * t);
  }
}

TEST_CASE("hermitian_decompose") {
  const EigenResult e = hermitian_decompose(diag({0.3, 0.7}));
  CHECK(e.values[0] == doctest::Approx(0.7));
  CHECK(e.values[1] == doctest::Approx(0.3));

  Tensor plus({2, 2}, {0.5, 0.5, 0.5, 0.5});
  const EigenResult p = hermitian_decompose(plus);
  CHECK(p.values[0] == doctest::Approx(1.0));
  CHECK(std::abs(p.values[1]) <= 1e-15);

  Tensor bad({2, 2}, {0.0, 1.0, 0.0, 0.0});
  CHECK_THROWS_AS(hermitian_decompose(bad), ArgumentError);

  std::mt19937_64 rng(9);
  const Matrix g = linalg::random_gaussian(10, 10, rng);
  const Matrix m = g * g.adjoint();
  const linalg::Eig eig = linalg::hermitian_eig(m);
  for (Eigen::Index i = 1; i < eig.values.size(); ++i) {
    CHECK(eig.values[i - 1] >= eig.values[i]);
  }
  const Matrix rec =
      eig.vectors * eig.values.asDiagonal() * eig.vectors.adjoint();
  CHECK(max_abs(rec - m) <= 1e-12 * max_abs(m));
}

TEST_CASE("psd_factor") {
  const Matrix c = linalg::psd_factor(Matrix::Identity(3, 3));
  CHECK(c.cols() == 3);
  CHECK(max_abs(c * c.adjoint() - Matrix::Identity(3, 3)) <= 1e-14);

  CHECK(linalg::psd_factor(Matrix::Zero(3, 3)).cols() == 0);
  CHECK(psd_factor(Tensor({3, 3})).size() == 0);

  Tensor neg = diag({1.0, -0.1});
  CHECK_THROWS_AS(psd_factor(neg), NotPsdError);

  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix g = linalg::random_gaussian(8, 3 + trial % 6, rng);
    const Matrix m = g * g.adjoint();
    const Matrix f = linalg::psd_factor(m);
    CHECK(f.cols() == std::min<Eigen::Index>(8, g.cols()));
    const double lmax = linalg::hermitian_eig(m).values[0];
    CHECK(max_abs(f * f.adjoint() - m) <= 1e-12 * lmax);
  }
}

TEST_CASE("optimal_isometry") {
  const IsometryResult id = optimal_isometry(Tensor::identity(2));
  CHECK(id.value == doctest::Approx(2.0));
  CHECK(optimal_isometry(diag({3, -4})).value == doctest::Approx(7.0));

  std::mt19937_64 rng(12);
  for (int shape = 0; shape < 3; ++shape) {
    const std::size_t r = 4, c = 4 + 2 * shape;
    const Matrix m = linalg::random_gaussian(r, c, rng);
    const linalg::Isometry best = linalg::optimal_isometry(m);
    CHECK(std::abs((best.w * m).trace()) ==
          doctest::Approx(best.value).epsilon(1e-12));
    CHECK(std::abs(best.value - linalg::trace_norm(m)) <= 1e-12 * best.value);
    CHECK(linalg::isometry_residual(best.w) <= 1e-12);
    for (int k = 0; k < 1000; ++k) {
      const Matrix w = linalg::random_isometry(c, r, rng);
      CHECK(std::abs((w * m).trace()) <= best.value + 1e-12);
    }
  }
}

TEST_CASE("hermitian_exp") {
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  const Matrix e = linalg::hermitian_exp(z, cplx(0.0, -0.3));
  CHECK(std::abs(e(0, 0) - std::exp(cplx(0.0, -0.3))) <= 1e-15);
  CHECK(std::abs(e(1, 1) - std::exp(cplx(0.0, 0.3))) <= 1e-15);
}
