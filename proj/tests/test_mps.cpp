#include <cmath>
#include <limits>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "doctest.h"
#include "subfid/errors.hpp"
#include "subfid/hamiltonian.hpp"
#include "subfid/mps.hpp"
#include "subfid/oracle.hpp"
#include "support.hpp"

using namespace subfid;
using namespace subfid::test;

namespace {

Vector basis(std::size_t k, std::size_t d = 2) {
  Vector v = Vector::Zero(d);
  v[k] = 1.0;
  return v;
}

double schmidt_norm_error(const MatrixProductState& s) {
  double worst = 0.0;
  for (std::size_t n = 0; n <= s.length(); ++n) {
    double sum = 0.0;
    for (double x : s.schmidt(n)) sum += x * x;
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

}  // namespace

TEST_CASE("random_mps") {
  const MatrixProductState p = random_mps(6, 2, 1, 3);
  for (std::size_t n = 0; n <= 6; ++n) {
    REQUIRE(p.schmidt(n).size() == 1);
    CHECK(p.schmidt(n)[0] == doctest::Approx(1.0));
  }
  CHECK(random_mps(8, 2, 4, 17) == random_mps(8, 2, 4, 17));
  CHECK_FALSE(random_mps(8, 2, 4, 17) == random_mps(8, 2, 4, 18));

  const MatrixProductState s = random_mps(8, 2, 4, 5);
  CHECK(s.is_canonical());
  CHECK(std::abs(statevector(s).norm() - 1.0) <= 1e-12);
  CHECK(canonical_residual(s) <= 1e-10);
  CHECK(schmidt_norm_error(s) <= 1e-10);
  CHECK(s.max_bond_dim() == 4);

  CHECK_THROWS_AS(random_mps(1, 2, 4, 0), ArgumentError);
  CHECK_THROWS_AS(random_mps(4, 2, 0, 0), ArgumentError);
}

TEST_CASE("canonicalize") {
  // Idempotence.
  const MatrixProductState s = random_mps(8, 2, 5, 9);
  const MatrixProductState t = canonicalize(s);
  CHECK(phase_distance(statevector(s), statevector(t)) <= 1e-12);
  for (std::size_t n = 0; n <= 8; ++n) {
    REQUIRE(s.schmidt(n).size() == t.schmidt(n).size());
    for (std::size_t i = 0; i < s.schmidt(n).size(); ++i) {
      CHECK(std::abs(s.schmidt(n)[i] - t.schmidt(n)[i]) <= 1e-12);
    }
  }

  // Unnormalized product state.
  std::vector<Vector> vs = {2.0 * basis(0), Vector::Ones(2), 0.5 * basis(1)};
  const MatrixProductState prod = product_mps(vs);
  CHECK_FALSE(prod.is_canonical());
  const MatrixProductState cp = canonicalize(prod);
  Vector expect = Eigen::kroneckerProduct(
      Eigen::kroneckerProduct(basis(0), Vector(Vector::Ones(2) / std::sqrt(2.0))).eval(),
      basis(1));
  CHECK(phase_distance(statevector(cp), expect) <= 1e-12);
  CHECK(canonical_residual(cp) <= 1e-12);

  // Random non-canonical chain.
  std::mt19937_64 rng(21);
  const MatrixProductState raw = gaussian_chain(8, 3, rng);
  const MatrixProductState can = canonicalize(raw);
  CHECK(can.is_canonical());
  CHECK(canonical_residual(can) <= 1e-10);
  CHECK(schmidt_norm_error(can) <= 1e-10);
  CHECK(phase_distance(unit(statevector(raw)), statevector(can)) <= 1e-10);

  // Zero state.
  std::vector<Vector> zero = {basis(0), Vector::Zero(2)};
  CHECK_THROWS_AS(canonicalize(product_mps(zero)), DegenerateStateError);
}

TEST_CASE("canonicalize is gauge invariant") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixProductState s = random_mps(8, 2, 4, 100 + trial);
    std::vector<Tensor> sites;
    for (std::size_t n = 0; n < 8; ++n) {
      sites.push_back(Tensor::from_matrix(s.right_site(n), s.gamma(n).shape()));
    }
    // Insert X X^-1 on every interior bond.
    for (std::size_t n = 1; n < 8; ++n) {
      const std::size_t chi = s.bond_dim(n);
      const Matrix x = linalg::random_gaussian(chi, chi, rng) +
                       3.0 * Matrix::Identity(chi, chi);
      const Matrix xi = x.inverse();
      const Tensor& left = sites[n - 1];
      const Matrix lm = left.matrix(2) * x;
      sites[n - 1] = Tensor::from_matrix(lm, left.shape());
      const Tensor& right = sites[n];
      const Matrix rm = xi * right.matrix(1);
      sites[n] = Tensor::from_matrix(rm, right.shape());
    }
    const MatrixProductState gauged = MatrixProductState::from_site_tensors(sites);
    CHECK(phase_distance(unit(statevector(gauged)), statevector(s)) <= 1e-9);
    CHECK(phase_distance(statevector(canonicalize(gauged)), statevector(s)) <= 1e-9);
  }
}

TEST_CASE("overlap") {
  const MatrixProductState s = random_mps(10, 2, 6, 1);
  CHECK(std::abs(overlap(s, s) - 1.0) <= 1e-10);
  const MatrixProductState p0 = product_mps({basis(0), basis(0), basis(1)});
  const MatrixProductState p1 = product_mps({basis(0), basis(1), basis(1)});
  CHECK(std::abs(overlap(p0, p1)) == 0.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const MatrixProductState a = random_mps(10, 2, 4, 2 * seed);
    const MatrixProductState b = random_mps(10, 2, 3, 2 * seed + 1);
    const cplx ref = statevector(a).dot(statevector(b));
    CHECK(std::abs(overlap(a, b) - ref) <= 1e-10);
    CHECK(std::abs(overlap(a, b)) <= 1.0 + 1e-10);
  }
  CHECK_THROWS_AS(overlap(random_mps(4, 2, 2, 0), random_mps(5, 2, 2, 0)),
                  ArgumentError);
}

TEST_CASE("expect_local") {
  const MatrixProductState zeros = product_mps(std::vector<Vector>(5, basis(0)));
  CHECK(std::abs(expect_local(zeros, op2(pauli_z()), 2) - 1.0) <= 1e-15);
  CHECK(std::abs(expect_local(zeros, op2(pauli_x()), 2)) <= 1e-15);
  CHECK_THROWS_AS(expect_local(zeros, op2(pauli_z()), 5), ArgumentError);

  const MatrixProductState s = random_mps(8, 2, 4, 44);
  const Tensor vec = mps_to_statevector(s);
  for (std::size_t site = 0; site < 8; ++site) {
    const Matrix rho = reduced_density_matrix(vec, 8, site, site + 1).matrix.matrix();
    for (const Matrix& op : {pauli_x(), pauli_y(), pauli_z()}) {
      const cplx ref = (rho * op).trace();
      const cplx got = expect_local(s, op2(op), site);
      CHECK(std::abs(got - ref) <= 1e-10);
      CHECK(std::abs(got.imag()) <= 1e-10);
    }
  }
  const Matrix xx = Eigen::kroneckerProduct(pauli_x(), pauli_x());
  const Matrix rho2 = reduced_density_matrix(vec, 8, 3, 5).matrix.matrix();
  CHECK(std::abs(expect_two_site(s, op4(xx), 3) - (rho2 * xx).trace()) <= 1e-10);
}

TEST_CASE("apply_two_site_gate") {
  const MatrixProductState s = random_mps(8, 2, 4, 7);
  const GateResult id = apply_two_site_gate(s, op4(Matrix::Identity(4, 4)), 3,
                                            TruncationSpec::unbounded());
  CHECK(id.discarded_weight <= 1e-24);
  CHECK(phase_distance(statevector(id.state), statevector(s)) <= 1e-12);

  Matrix swap = Matrix::Zero(4, 4);
  swap(0, 0) = swap(3, 3) = swap(1, 2) = swap(2, 1) = 1.0;
  const MatrixProductState p = product_mps({basis(0), basis(0), basis(1), basis(1)});
  const GateResult sw = apply_two_site_gate(p, op4(swap), 1, TruncationSpec::unbounded());
  const MatrixProductState expect =
      product_mps({basis(0), basis(1), basis(0), basis(1)});
  CHECK(phase_distance(statevector(sw.state), statevector(expect)) <= 1e-14);

  std::mt19937_64 rng(8);
  for (std::size_t site = 0; site < 7; ++site) {
    const Matrix u = linalg::random_unitary(4, rng);
    const GateResult r = apply_two_site_gate(s, op4(u), site, TruncationSpec::unbounded());
    CHECK(r.state.is_canonical());
    CHECK(canonical_residual(r.state) <= 1e-10);
    // Oracle: apply u to the full vector.
    const Vector v = statevector(s);
    Vector ref = Vector::Zero(v.size());
    const std::size_t low = std::size_t{1} << (8 - site - 2);
    const std::size_t high = std::size_t{1} << site;
    for (std::size_t a = 0; a < high; ++a) {
      for (std::size_t c = 0; c < low; ++c) {
        for (std::size_t p = 0; p < 4; ++p) {
          for (std::size_t q = 0; q < 4; ++q) {
            ref[(a * 4 + p) * low + c] += u(p, q) * v[(a * 4 + q) * low + c];
          }
        }
      }
    }
    CHECK((statevector(r.state) - ref).cwiseAbs().maxCoeff() <= 1e-10);
  }

  // Truncation reports the dropped weight.
  const MatrixProductState wide = random_mps(8, 2, 8, 3);
  const GateResult tr = apply_two_site_gate(wide, op4(linalg::random_unitary(4, rng)), 3,
                                            TruncationSpec::rank(2));
  CHECK(tr.state.bond_dim(4) == 2);
  CHECK(tr.discarded_weight > 0.0);
  CHECK(canonical_residual(tr.state) <= 1e-10);

  CHECK_THROWS_AS(apply_two_site_gate(product_mps({Vector(Vector::Ones(2)), basis(0)}),
                                      op4(swap), 0, TruncationSpec::unbounded()),
                  StateError);
}

TEST_CASE("correlation_length") {
  const MatrixProductState p = product_mps(std::vector<Vector>(10, basis(0)));
  CHECK(correlation_length(p) == 0.0);

  // GHZ chain: (|0...0> + |1...1>)/sqrt(2).
  std::vector<Tensor> sites;
  const std::size_t len = 10;
  for (std::size_t n = 0; n < len; ++n) {
    const std::size_t cl = n == 0 ? 1 : 2;
    const std::size_t cr = n + 1 == len ? 1 : 2;
    Tensor t({cl, 2, cr});
    for (std::size_t s = 0; s < 2; ++s) t({cl == 1 ? 0 : s, s, cr == 1 ? 0 : s}) = 1.0;
    sites.push_back(t);
  }
  const MatrixProductState ghz = canonicalize(MatrixProductState::from_site_tensors(sites));
  CHECK(ghz.bond_dim(5) == 2);
  CHECK(correlation_length(ghz) == std::numeric_limits<double>::infinity());

  const double xi = correlation_length(random_mps(12, 2, 4, 3));
  CHECK(xi > 0.0);
  CHECK(std::isfinite(xi));
}
