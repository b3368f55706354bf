#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "subfid/hamiltonian.hpp"
#include "subfid/linalg.hpp"
#include "subfid/mps.hpp"

namespace subfid {

enum class TimeKind { real, imaginary };

struct StepDiagnostics {
  std::size_t step = 0;      // 1-based
  double time = 0.0;         // accumulated dt
  double energy = 0.0;       // <H> after the step
  double max_discarded = 0.0;
  std::size_t max_bond_dim = 0;
};

struct EvolutionConfig {
  TimeKind kind = TimeKind::real;
  // Real time applies exp(-i dt H) per step and accepts either sign of dt;
  // imaginary time applies exp(-dt H) and needs dt > 0.
  double dt = 0.05;
  std::size_t steps = 1;
  int trotter_order = 2;
  TruncationSpec truncation = TruncationSpec::rank(50);
  // Imaginary time only: stop once the per-site energy change of a step
  // falls below this value (0 disables the check).
  double convergence_threshold = 0.0;
  // Steps whose largest discarded weight exceeds this are flagged.
  double discarded_alarm = 1e-8;
  // Called after every step with the canonical state.
  std::function<void(const StepDiagnostics&, const MatrixProductState&)> observer;
};

struct EvolutionResult {
  MatrixProductState state;
  std::vector<StepDiagnostics> steps;
  bool converged = false;      // imaginary time with a threshold only
  std::size_t alarms = 0;      // steps above the discarded-weight alarm
};

// Trotterized evolution with two-site gates on alternating bond layers. The
// state is re-canonicalized after every step in which a gate was non-unitary
// or weight was discarded, so each step starts canonical.
EvolutionResult tebd_evolve(MatrixProductState state, const BondHamiltonian& h,
                            const EvolutionConfig& config);

// <psi|H|psi> of a canonical state.
double mps_energy(const MatrixProductState& state, const BondHamiltonian& h);

struct GroundStateStage {
  double dt = 0.1;
  std::size_t chi = 32;
  std::size_t max_steps = 10000;
};

struct GroundStateOptions {
  std::vector<GroundStateStage> stages;
  // Per-site energy change per step that ends a stage.
  double threshold = 1e-10;
  double weight_cutoff = 1e-14;
  std::size_t initial_chi = 2;
  std::uint64_t seed = 0;
  // Starting state; a seeded random MPS of bond dimension initial_chi when
  // empty. Must be canonical.
  std::optional<MatrixProductState> initial;
  std::function<void(const StepDiagnostics&, const MatrixProductState&)> observer;
};

// Stages dt = 0.1, 0.01, 0.001 at bond dimension chi, preceded by a dt = 0.1
// warm-up at a smaller bond dimension when chi > ramp_chi.
GroundStateOptions default_ground_state_options(std::size_t chi,
                                                std::size_t max_steps = 10000,
                                                std::size_t ramp_chi = 16);

struct GroundStateSearch {
  MatrixProductState state;
  double energy = 0.0;
  std::size_t steps = 0;
  // True when every stage met the threshold before its step cap.
  bool converged = false;
  std::vector<std::size_t> stage_steps;
};

// Imaginary-time TEBD from a seeded random state.
GroundStateSearch tebd_ground_state(const BondHamiltonian& h,
                                    const GroundStateOptions& options);

}  // namespace subfid
