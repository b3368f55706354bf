#include <cmath>

#include "doctest.h"
#include "subfid/errors.hpp"
#include "subfid/tebd.hpp"
#include "support.hpp"

using namespace subfid;
using namespace subfid::test;

namespace {

EvolutionConfig real_time(double dt, std::size_t steps) {
  EvolutionConfig cfg;
  cfg.dt = dt;
  cfg.steps = steps;
  cfg.truncation = TruncationSpec::unbounded();
  return cfg;
}

}  // namespace

TEST_CASE("energy of a canonical state") {
  const auto s = random_mps(8, 2, 4, 1);
  const BondHamiltonian h = ising_terms({0.7, 8, true});
  const Vector v = statevector(s);
  const double ref = v.dot(sparse_hamiltonian(h) * v).real();
  CHECK(std::abs(mps_energy(s, h) - ref) <= 1e-12);
}

TEST_CASE("zero Hamiltonian leaves the state unchanged") {
  const auto s = random_mps(6, 2, 4, 2);
  const auto res = tebd_evolve(s, zero_hamiltonian(6, 2), real_time(0.1, 5));
  CHECK(phase_distance(statevector(res.state), statevector(s)) <= 1e-12);
  CHECK(res.steps.size() == 5);
}

TEST_CASE("real-time evolution is reversible") {
  const auto s = random_mps(8, 2, 2, 3);
  const BondHamiltonian h = ising_terms({1.0, 8, true});
  const auto fwd = tebd_evolve(s, h, real_time(0.05, 10));
  for (const auto& d : fwd.steps) CHECK(d.max_discarded <= 1e-20);
  const auto back = tebd_evolve(fwd.state, h, real_time(-0.05, 10));
  CHECK(std::abs(std::abs(overlap(back.state, s)) - 1.0) <= 1e-8);
  CHECK(canonical_residual(back.state) <= 1e-10);
}

TEST_CASE("second-order Trotter error scales as dt^2") {
  const auto s = random_mps(8, 2, 4, 4);
  const BondHamiltonian h = ising_terms({0.9, 8, true});
  const double total = 0.8;
  const Vector exact =
      exact_evolution(mps_to_statevector(s), dense_hamiltonian(h), total).vector();
  double prev = 0.0;
  for (std::size_t n : {8, 16, 32}) {
    const auto res = tebd_evolve(s, h, real_time(total / n, n));
    const double err = (statevector(res.state) - exact).norm();
    if (prev > 0.0) {
      CHECK(prev / err >= 3.0);
      CHECK(prev / err <= 5.0);
    }
    prev = err;
  }
  // First order is one power worse.
  auto cfg = real_time(total / 16, 16);
  cfg.trotter_order = 1;
  const double e1 = (statevector(tebd_evolve(s, h, cfg).state) - exact).norm();
  cfg = real_time(total / 32, 32);
  cfg.trotter_order = 1;
  const double e2 = (statevector(tebd_evolve(s, h, cfg).state) - exact).norm();
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("imaginary time lowers the energy") {
  const BondHamiltonian h = ising_terms({1.0, 10, true});
  EvolutionConfig cfg;
  cfg.kind = TimeKind::imaginary;
  cfg.dt = 0.05;
  cfg.steps = 100;
  cfg.truncation = TruncationSpec::rank(16, 1e-12);
  std::size_t seen = 0;
  cfg.observer = [&](const StepDiagnostics& d, const MatrixProductState& st) {
    ++seen;
    CHECK(canonical_residual(st) <= 1e-10);
    CHECK(d.max_bond_dim <= 16);
  };
  const auto s = random_mps(10, 2, 4, 5);
  const auto res = tebd_evolve(s, h, cfg);
  CHECK(seen == 100);
  double prev = mps_energy(s, h);
  for (const auto& d : res.steps) {
    CHECK(d.energy <= prev + 1e-10);
    prev = d.energy;
  }
}

TEST_CASE("discarded-weight alarm") {
  const BondHamiltonian h = ising_terms({1.0, 10, true});
  EvolutionConfig cfg = real_time(0.1, 5);
  cfg.truncation = TruncationSpec::rank(2);
  const auto res = tebd_evolve(random_mps(10, 2, 2, 6), h, cfg);
  CHECK(res.alarms > 0);
  CHECK(canonical_residual(res.state) <= 1e-10);
}

TEST_CASE("argument checks") {
  const BondHamiltonian h = ising_terms({1.0, 6, true});
  const auto s = random_mps(6, 2, 2, 7);
  EvolutionConfig cfg;
  cfg.trotter_order = 3;
  CHECK_THROWS_AS(tebd_evolve(s, h, cfg), ArgumentError);
  cfg = EvolutionConfig{};
  cfg.kind = TimeKind::imaginary;
  cfg.dt = -0.1;
  CHECK_THROWS_AS(tebd_evolve(s, h, cfg), ArgumentError);
  CHECK_THROWS_AS(tebd_evolve(s, ising_terms({1.0, 7, true}), EvolutionConfig{}),
                  DimensionError);
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(tebd_evolve(gaussian_chain(6, 2, rng), h, EvolutionConfig{}), StateError);
}

TEST_CASE("ground state of the critical chain") {
  const BondHamiltonian h = ising_terms({1.0, 12, true});
  const double exact = exact_ground_state(h).energy;
  const auto gs = tebd_ground_state(h, default_ground_state_options(32));
  MESSAGE("steps per stage: " << gs.stage_steps[0] << " " << gs.stage_steps[1] << " "
                              << gs.stage_steps[2] << " " << gs.stage_steps[3]
                              << ", error " << gs.energy - exact);
  CHECK(gs.converged);
  CHECK(std::abs(gs.energy - exact) <= 1e-6);
  CHECK(gs.energy >= exact - 1e-10);
}
