#include "subfid/tebd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "subfid/errors.hpp"

namespace subfid {

namespace {

using Layer = std::vector<std::pair<std::size_t, Matrix>>;

// Gates for the bonds i with i % 2 == parity, exp(factor * tau * h_i).
Layer make_layer(const BondHamiltonian& h, std::size_t parity, cplx factor) {
  Layer out;
  for (std::size_t i = parity; i < h.terms.size(); i += 2) {
    out.emplace_back(i, linalg::hermitian_exp(h.bond_matrix(i), factor));
  }
  return out;
}

double apply_layer(MatrixProductState& state, const Layer& layer,
                   const TruncationSpec& truncation) {
  double worst = 0.0;
  for (const auto& [site, gate] : layer) {
    worst = std::max(worst, state.apply_gate(gate, site, truncation));
  }
  return worst;
}

void check_config(const MatrixProductState& state, const BondHamiltonian& h,
                  const EvolutionConfig& config) {
  if (h.length() != state.length() || h.phys_dim != state.phys_dim()) {
    throw DimensionError("tebd_evolve: Hamiltonian does not match the chain");
  }
  if (config.trotter_order != 1 && config.trotter_order != 2) {
    throw ArgumentError("tebd_evolve: trotter_order must be 1 or 2");
  }
  if (!std::isfinite(config.dt) ||
      (config.kind == TimeKind::imaginary && !(config.dt > 0.0))) {
    throw ArgumentError("tebd_evolve: invalid dt");
  }
  if (!state.is_canonical()) {
    throw StateError("tebd_evolve: input state must be canonical");
  }
}

}  // namespace

double mps_energy(const MatrixProductState& state, const BondHamiltonian& h) {
  if (h.length() != state.length() || h.phys_dim != state.phys_dim()) {
    throw DimensionError("mps_energy: Hamiltonian does not match the chain");
  }
  double e = 0.0;
  for (std::size_t i = 0; i < h.terms.size(); ++i) {
    e += expect_two_site(state, h.terms[i], i).real();
  }
  return e;
}

EvolutionResult tebd_evolve(MatrixProductState state, const BondHamiltonian& h,
                            const EvolutionConfig& config) {
  check_config(state, h, config);
  const cplx unit = config.kind == TimeKind::real ? cplx(0.0, -1.0) : cplx(-1.0, 0.0);
  const double dt = config.dt;
  const bool second = config.trotter_order == 2;
  const Layer even = make_layer(h, 0, unit * (second ? 0.5 * dt : dt));
  const Layer odd = make_layer(h, 1, unit * dt);

  EvolutionResult out{std::move(state), {}, false, 0};
  MatrixProductState& psi = out.state;
  const double sites = static_cast<double>(psi.length());
  double energy = mps_energy(psi, h);
  for (std::size_t step = 1; step <= config.steps; ++step) {
    double worst = apply_layer(psi, even, config.truncation);
    worst = std::max(worst, apply_layer(psi, odd, config.truncation));
    if (second) worst = std::max(worst, apply_layer(psi, even, config.truncation));
    if (!psi.is_canonical()) psi.canonicalize_in_place();

    const double previous = energy;
    energy = mps_energy(psi, h);
    StepDiagnostics diag{step, static_cast<double>(step) * dt, energy, worst,
                         psi.max_bond_dim()};
    if (worst > config.discarded_alarm) ++out.alarms;
    out.steps.push_back(diag);
    if (config.observer) config.observer(diag, psi);
    if (config.kind == TimeKind::imaginary && config.convergence_threshold > 0.0 &&
        std::abs(energy - previous) / sites < config.convergence_threshold) {
      out.converged = true;
      break;
    }
  }
  return out;
}

GroundStateOptions default_ground_state_options(std::size_t chi,
                                                std::size_t max_steps,
                                                std::size_t ramp_chi) {
  GroundStateOptions opts;
  if (chi > ramp_chi) opts.stages.push_back({0.1, ramp_chi, max_steps});
  for (double dt : {0.1, 0.01, 0.001}) opts.stages.push_back({dt, chi, max_steps});
  return opts;
}

GroundStateSearch tebd_ground_state(const BondHamiltonian& h,
                                    const GroundStateOptions& options) {
  if (options.stages.empty()) {
    throw ArgumentError("tebd_ground_state: no stages");
  }
  GroundStateSearch out{
      options.initial ? *options.initial
                      : random_mps(h.length(), h.phys_dim, options.initial_chi, options.seed),
      0.0, 0,
      true, {}};
  for (const auto& stage : options.stages) {
    if (stage.chi == 0) throw ArgumentError("tebd_ground_state: chi must be positive");
    EvolutionConfig cfg;
    cfg.kind = TimeKind::imaginary;
    cfg.dt = stage.dt;
    cfg.steps = stage.max_steps;
    cfg.trotter_order = 2;
    cfg.truncation = TruncationSpec::rank(stage.chi, options.weight_cutoff);
    cfg.convergence_threshold = options.threshold;
    cfg.discarded_alarm = 1.0;
    const std::size_t offset = out.steps;
    if (options.observer) {
      cfg.observer = [&](const StepDiagnostics& d, const MatrixProductState& s) {
        StepDiagnostics shifted = d;
        shifted.step += offset;
        options.observer(shifted, s);
      };
    }
    EvolutionResult res = tebd_evolve(std::move(out.state), h, cfg);
    out.state = std::move(res.state);
    out.steps += res.steps.size();
    out.stage_steps.push_back(res.steps.size());
    out.converged = out.converged && res.converged;
  }
  out.energy = mps_energy(out.state, h);
  return out;
}

}  // namespace subfid
