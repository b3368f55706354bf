#include <cmath>
#include <random>

#include "doctest.h"
#include "subfid/errors.hpp"
#include "subfid/fidelity_mps.hpp"
#include "support.hpp"

using namespace subfid;
using namespace subfid::test;

namespace {

double exact_window(const MatrixProductState& a, const MatrixProductState& b,
                    std::size_t x0, std::size_t x1) {
  const Tensor va = mps_to_statevector(a), vb = mps_to_statevector(b);
  const std::size_t L = a.length();
  return uhlmann_exact(reduced_density_matrix(va, L, x0, x1),
                       reduced_density_matrix(vb, L, x0, x1));
}

}  // namespace

TEST_CASE("half-system fidelity against the oracle") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const std::size_t chi = 2 + 2 * (seed % 3);
    const auto a = random_mps(8, 2, chi, 100 + seed);
    const auto b = random_mps(8, 2, chi, 200 + seed);
    const auto left = half_system_profile(a, b, Side::left);
    const auto right = half_system_profile(a, b, Side::right);
    for (std::size_t cut = 1; cut < 8; ++cut) {
      const double fl = half_system_fidelity(a, b, cut, Side::left).value;
      const double fr = half_system_fidelity(a, b, cut, Side::right).value;
      CHECK(std::abs(fl - exact_window(a, b, 0, cut)) <= 1e-10);
      CHECK(std::abs(fr - exact_window(a, b, cut, 8)) <= 1e-10);
      CHECK(std::abs(left[cut - 1].value - fl) <= 1e-12);
      CHECK(std::abs(right[cut - 1].value - fr) <= 1e-12);
    }
    // Left fidelity shrinks as the subsystem grows.
    for (std::size_t i = 1; i < left.size(); ++i) {
      CHECK(left[i].value <= left[i - 1].value + 1e-12);
    }
  }
}

TEST_CASE("half-system fidelity of identical and product states") {
  const auto a = random_mps(6, 2, 4, 1);
  for (std::size_t cut = 1; cut < 6; ++cut) {
    CHECK(half_system_fidelity(a, a, cut, Side::left).value ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  Vector up(2), plus(2);
  up << 1.0, 0.0;
  plus << std::sqrt(0.5), std::sqrt(0.5);
  const auto p = product_mps({up, up, up});
  const auto q = product_mps({plus, up, plus});
  CHECK(half_system_fidelity(p, q, 2, Side::left).value ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(half_system_fidelity(p, q, 1, Side::right).value ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("window fidelity routes agree with the oracle") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const std::size_t chi = 2 + 2 * (seed % 3);
    const auto a = random_mps(9, 2, chi, 300 + seed);
    const auto b = random_mps(9, 2, chi, 400 + seed);
    for (auto [x0, x1] : {std::pair<std::size_t, std::size_t>{0, 2}, {3, 4}, {2, 6},
                          {4, 9}, {1, 8}}) {
      const double ref = exact_window(a, b, x0, x1);
      const double phys = window_fidelity(a, b, x0, x1, WindowContraction::physical).value;
      const double tr = window_fidelity(a, b, x0, x1, WindowContraction::transfer).value;
      CHECK(std::abs(phys - ref) <= 1e-10);
      CHECK(std::abs(tr - ref) <= 1e-10);
      CHECK(std::abs(window_fidelity(a, b, x0, x1).value - ref) <= 1e-10);
    }
  }
}

TEST_CASE("window fidelity argument checks") {
  const auto a = random_mps(5, 2, 2, 1);
  const auto b = random_mps(5, 2, 2, 2);
  CHECK_THROWS_AS(window_fidelity(a, b, 2, 2), ArgumentError);
  CHECK_THROWS_AS(window_fidelity(a, b, 3, 6), ArgumentError);
  CHECK_THROWS_AS(window_fidelity(a, random_mps(6, 2, 2, 3), 0, 2), ArgumentError);
  CHECK_THROWS_AS(half_system_fidelity(a, b, 0, Side::left), ArgumentError);
  std::mt19937_64 rng(3);
  CHECK_THROWS_AS(window_fidelity(a, gaussian_chain(5, 2, rng), 1, 3), StateError);
}

TEST_CASE("disjoint window fidelity") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto a = random_mps(8, 2, 4, 500 + seed);
    const auto b = random_mps(8, 2, 4, 600 + seed);
    const std::size_t x0 = 2 + seed % 3, x1 = x0 + 2;
    const FidelityReport d = disjoint_window_fidelity(a, b, x0, x1);
    const RestrictedResult ref =
        restricted_fidelity(mps_to_statevector(a), mps_to_statevector(b), 8, x0, x1,
                            RestrictionMode::disjoint);
    CHECK(std::abs(d.value - ref.value) <= 1e-6);
    CHECK(d.value <= window_fidelity(a, b, x0, x1).value + 1e-10);
    CHECK(d.method == FidelityMethod::window_disjoint);
  }
  const auto a = random_mps(6, 2, 4, 7);
  CHECK(disjoint_window_fidelity(a, a, 2, 4).value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("centered profile matches single windows") {
  const auto a = random_mps(12, 2, 4, 11);
  const auto b = random_mps(12, 2, 4, 12);
  const auto rows = centered_window_profile(a, b, 6, 8, true);
  REQUIRE(rows.size() == 8);
  for (std::size_t w = 1; w <= rows.size(); ++w) {
    const auto& r = rows[w - 1];
    CHECK(r.x0 == 6 - w / 2);
    CHECK(r.x1 - r.x0 == w);
    CHECK(std::abs(r.uhlmann.value - window_fidelity(a, b, r.x0, r.x1).value) <= 1e-10);
    CHECK(r.disjoint.value <= r.uhlmann.value + 1e-10);
    if (w > 1) CHECK(r.uhlmann.value <= rows[w - 2].uhlmann.value + 1e-10);
  }
}
