#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "subfid/fidelity_mps.hpp"
#include "subfid/hamiltonian.hpp"
#include "subfid/record.hpp"
#include "subfid/tebd.hpp"

namespace subfid {

// ---- local quench ----------------------------------------------------------

enum class ProbeKind { two_site, left_half, right_half };

std::string to_string(ProbeKind kind);
ProbeKind parse_probe_kind(const std::string& name);

// two_site: window [x, x+2); left_half: sites [0, x); right_half: [x, L).
struct QuenchProbe {
  ProbeKind kind = ProbeKind::two_site;
  std::size_t x = 0;
};

// Every valid position of the given kinds on an L-site chain.
std::vector<QuenchProbe> all_probes(std::size_t length, const std::vector<ProbeKind>& kinds);

// Second order, dt = 0.05, bond dimension cap 50, discarded-weight alarm
// at 1e-8 per step.
EvolutionConfig default_quench_evolution();

struct QuenchConfig {
  Matrix op;                 // Pauli Z when empty
  std::size_t site = 0;
  std::vector<double> times; // multiples of the time step, ascending
  EvolutionConfig evolution = default_quench_evolution();
  std::vector<QuenchProbe> probes;
};

// |psi(t)> = exp(+i t H) O_site |E0>; for every sampled t and probe, the
// fidelity between |psi(t)> and |E0> on the probe region plus <Z_x> of
// |psi(t)>. Columns t,x,probe,fidelity,expect_z; the parameter overlap@<t>
// holds |<psi(t)|E0>|.
ExperimentRecord run_quench(const MatrixProductState& ground, const BondHamiltonian& h,
                            const QuenchConfig& config);

// ---- window scans between two ground states --------------------------------

struct GroundStateBudget {
  std::size_t max_steps = 2000;  // per imaginary-time stage
  std::size_t ramp_chi = 16;
  double threshold = 1e-10;
};

// Starts from `initial` when given, otherwise from a seeded random MPS.
MatrixProductState ising_ground_state(double h, std::size_t length, std::size_t chi,
                                      std::uint64_t seed, const GroundStateBudget& budget,
                                      std::optional<MatrixProductState> initial = std::nullopt);

// Columns window_size,F,F_d,dF_dM,xi_1,xi_2 for windows of width
// 1 .. max_window centered on the chain. dF_dM is the backward difference
// F(M) - F(M-1) with F(0) = 1.
ExperimentRecord run_scale_compare(const MatrixProductState& a, const MatrixProductState& b,
                                   std::size_t max_window,
                                   const DisjointOptions& disjoint = {});

struct ScaleCompareConfig {
  double h1 = 1.0;
  double h2 = 1.05;
  std::size_t length = 256;
  std::size_t chi = 50;
  std::size_t max_window = 64;
  std::uint64_t seed = 0;
  GroundStateBudget budget;
};

ExperimentRecord run_scale_compare(const ScaleCompareConfig& config);

struct ConvergenceChiConfig {
  double h = 1.0;
  std::size_t length = 256;
  std::vector<std::pair<std::size_t, std::size_t>> chi_pairs{{10, 20}};
  std::size_t max_window = 64;
  std::uint64_t seed = 0;
  GroundStateBudget budget;
};

// Columns window_size,chi_a,chi_b,one_minus_F,one_minus_Fd; one block of
// rows per chi pair. Ground states are found in ascending chi, each one
// starting from the previous result.
ExperimentRecord run_convergence_chi(const ConvergenceChiConfig& config);

// ---- tree convergence ------------------------------------------------------

struct ConvergenceTtnConfig {
  std::size_t depth = 6;
  std::size_t chi = 12;
  double h = 1.0;
  std::size_t sweeps = 200;
  std::size_t lag = 10;
  std::vector<std::size_t> window_sizes;  // empty: every branch size
  std::uint64_t seed = 0;
};

// Columns iteration,window_size,per_site_F. For every sweep m > lag and
// branch size |M|, the smallest F^(1/|M|) over the branches of that size
// between the optimizer snapshots after sweeps m and m - lag.
ExperimentRecord run_convergence_ttn(const ConvergenceTtnConfig& config);

// First iteration from which 1 - per_site_F stays below threshold for the
// rest of the record.
std::optional<std::size_t> permanent_convergence(const ExperimentRecord& record,
                                                 std::size_t window_size, double threshold);

}  // namespace subfid
