#include "subfid/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "subfid/errors.hpp"
#include "subfid/parallel.hpp"
#include "subfid/ttn.hpp"

namespace subfid {

namespace {

std::string str(double v) { return format_number(v); }
std::string str(std::size_t v) { return std::to_string(v); }

std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

}  // namespace

std::string to_string(ProbeKind kind) {
  switch (kind) {
    case ProbeKind::two_site: return "two_site";
    case ProbeKind::left_half: return "left_half";
    case ProbeKind::right_half: return "right_half";
  }
  return "unknown";
}

ProbeKind parse_probe_kind(const std::string& name) {
  for (auto k : {ProbeKind::two_site, ProbeKind::left_half, ProbeKind::right_half}) {
    if (to_string(k) == name) return k;
  }
  throw ArgumentError("unknown probe kind '" + name + "'");
}

std::vector<QuenchProbe> all_probes(std::size_t length, const std::vector<ProbeKind>& kinds) {
  std::vector<QuenchProbe> out;
  for (auto k : kinds) {
    if (k == ProbeKind::two_site) {
      for (std::size_t x = 0; x + 2 <= length; ++x) out.push_back({k, x});
    } else {
      for (std::size_t x = 1; x < length; ++x) out.push_back({k, x});
    }
  }
  return out;
}

EvolutionConfig default_quench_evolution() {
  EvolutionConfig cfg;
  cfg.kind = TimeKind::real;
  cfg.dt = 0.05;
  cfg.trotter_order = 2;
  cfg.truncation = TruncationSpec::rank(50);
  cfg.discarded_alarm = 1e-8;
  return cfg;
}

ExperimentRecord run_quench(const MatrixProductState& ground, const BondHamiltonian& h,
                            const QuenchConfig& config) {
  const std::size_t len = ground.length();
  if (!ground.is_canonical()) throw StateError("run_quench: ground state must be canonical");
  if (h.length() != len || h.phys_dim != ground.phys_dim()) {
    throw DimensionError("run_quench: Hamiltonian does not match the ground state");
  }
  if (config.site == 0 || config.site + 1 >= len) {
    throw ArgumentError("run_quench: insertion site must be interior");
  }
  for (const auto& p : config.probes) {
    const bool ok = p.kind == ProbeKind::two_site ? p.x + 2 <= len : (p.x > 0 && p.x < len);
    if (!ok) throw ArgumentError("run_quench: probe position outside the chain");
  }
  const double dt = std::abs(config.evolution.dt);
  if (!(dt > 0.0)) throw ArgumentError("run_quench: time step must be non-zero");
  std::vector<std::size_t> at_step;
  for (std::size_t i = 0; i < config.times.size(); ++i) {
    const double t = config.times[i];
    const double n = std::round(t / dt);
    if (t < 0.0 || std::abs(n * dt - t) > 1e-9 * std::max(1.0, t) ||
        (i > 0 && t <= config.times[i - 1])) {
      throw ArgumentError("run_quench: times must be ascending multiples of dt");
    }
    at_step.push_back(static_cast<std::size_t>(n));
  }

  ExperimentRecord rec;
  rec.experiment = "quench";
  rec.columns = {"t", "x", "probe", "fidelity", "expect_z"};
  rec.set("length", str(len));
  rec.set("site", str(config.site));
  rec.set("dt", str(dt));
  rec.set("trotter_order", std::to_string(config.evolution.trotter_order));
  if (config.evolution.truncation.max_rank) {
    rec.set("chi", str(*config.evolution.truncation.max_rank));
  }
  rec.set("convention", "psi(t) = exp(+i t H) O |E0>");

  MatrixProductState psi = ground;
  psi.apply_local(config.op.size() ? config.op : pauli_z(), config.site);
  if (!psi.is_canonical()) {
    psi.canonicalize_in_place();
    rec.set("renormalized", "true");
    rec.warnings.push_back("perturbation is not unitary; state renormalized");
  }
  const double t_max = config.times.empty() ? 0.0 : config.times.back();
  if (static_cast<double>(config.site) < t_max ||
      static_cast<double>(config.site) + t_max > static_cast<double>(len - 1)) {
    rec.warnings.push_back("front reaches the chain boundary before t_max");
    rec.set("boundary_warning", "true");
  }

  const Tensor z = Tensor::from_matrix(pauli_z());
  const bool need_left = std::any_of(config.probes.begin(), config.probes.end(),
                                     [](const auto& p) { return p.kind == ProbeKind::left_half; });
  const bool need_right = std::any_of(config.probes.begin(), config.probes.end(),
                                      [](const auto& p) { return p.kind == ProbeKind::right_half; });
  auto sample = [&](double t, const MatrixProductState& s) {
    std::vector<double> zs(len);
    parallel_for(len, [&](std::size_t x) { zs[x] = expect_local(s, z, x).real(); });
    std::vector<FidelityReport> left, right;
    if (need_left) left = half_system_profile(s, ground, Side::left);
    if (need_right) right = half_system_profile(s, ground, Side::right);
    std::vector<double> f(config.probes.size());
    parallel_for(config.probes.size(), [&](std::size_t i) {
      const auto& p = config.probes[i];
      switch (p.kind) {
        case ProbeKind::two_site:
          f[i] = window_fidelity(s, ground, p.x, p.x + 2, WindowContraction::physical).value;
          break;
        case ProbeKind::left_half: f[i] = left[p.x - 1].value; break;
        case ProbeKind::right_half: f[i] = right[p.x - 1].value; break;
      }
    });
    for (std::size_t i = 0; i < config.probes.size(); ++i) {
      const auto& p = config.probes[i];
      rec.rows.push_back({t, as_int(p.x), to_string(p.kind), f[i], zs[p.x]});
    }
    rec.set("overlap@" + str(t), str(std::abs(overlap(s, ground))));
  };

  std::size_t next = 0;
  while (next < at_step.size() && at_step[next] == 0) sample(config.times[next++], psi);
  EvolutionConfig ev = config.evolution;
  ev.kind = TimeKind::real;
  ev.dt = -dt;
  ev.steps = at_step.empty() ? 0 : at_step.back();
  double worst = 0.0;
  ev.observer = [&](const StepDiagnostics& d, const MatrixProductState& s) {
    worst = std::max(worst, d.max_discarded);
    while (next < at_step.size() && at_step[next] == d.step) sample(config.times[next++], s);
  };
  const EvolutionResult res = tebd_evolve(std::move(psi), h, ev);
  rec.set("steps", str(res.steps.size()));
  rec.set("max_discarded", str(worst));
  rec.set("alarms", str(res.alarms));
  if (res.alarms > 0) {
    rec.warnings.push_back(std::to_string(res.alarms) +
                           " steps exceeded the discarded-weight alarm");
  }
  return rec;
}

MatrixProductState ising_ground_state(double h, std::size_t length, std::size_t chi,
                                      std::uint64_t seed, const GroundStateBudget& budget,
                                      std::optional<MatrixProductState> initial) {
  GroundStateOptions opts = default_ground_state_options(chi, budget.max_steps, budget.ramp_chi);
  opts.threshold = budget.threshold;
  opts.seed = seed;
  opts.initial = std::move(initial);
  return tebd_ground_state(ising_terms({h, length, true}), opts).state;
}

ExperimentRecord run_scale_compare(const MatrixProductState& a, const MatrixProductState& b,
                                   std::size_t max_window, const DisjointOptions& disjoint) {
  const std::size_t len = a.length();
  if (b.length() != len) throw ArgumentError("run_scale_compare: chain lengths differ");
  if (max_window == 0 || max_window > len) {
    throw ArgumentError("run_scale_compare: max_window must be in 1 .. L");
  }
  const auto profile = centered_window_profile(a, b, len / 2, max_window, true, disjoint);
  double xi[2];
  parallel_for(2, [&](std::size_t i) { xi[i] = correlation_length(i == 0 ? a : b); });
  ExperimentRecord rec;
  rec.experiment = "scale-compare";
  rec.columns = {"window_size", "F", "F_d", "dF_dM", "xi_1", "xi_2"};
  double prev = 1.0;
  for (const auto& row : profile) {
    const double f = row.uhlmann.value;
    rec.rows.push_back({as_int(row.x1 - row.x0), f, row.disjoint.value, f - prev, xi[0], xi[1]});
    prev = f;
  }
  rec.set("length", str(len));
  rec.set("center", str(len / 2));
  rec.set("disjoint_seed", std::to_string(disjoint.seed));
  return rec;
}

ExperimentRecord run_scale_compare(const ScaleCompareConfig& c) {
  std::optional<MatrixProductState> states[2];
  const double hs[2] = {c.h1, c.h2};
  parallel_for(2, [&](std::size_t i) {
    states[i] = ising_ground_state(hs[i], c.length, c.chi, c.seed, c.budget);
  });
  DisjointOptions dis;
  dis.seed = c.seed;
  ExperimentRecord rec = run_scale_compare(*states[0], *states[1], c.max_window, dis);
  rec.set("h1", str(c.h1));
  rec.set("h2", str(c.h2));
  rec.set("chi", str(c.chi));
  rec.set("seed", std::to_string(c.seed));
  rec.set("max_steps_per_stage", str(c.budget.max_steps));
  return rec;
}

ExperimentRecord run_convergence_chi(const ConvergenceChiConfig& c) {
  std::set<std::size_t> distinct;
  for (const auto& [x, y] : c.chi_pairs) {
    if (x == 0 || y == 0) throw ArgumentError("run_convergence_chi: chi must be positive");
    distinct.insert(x);
    distinct.insert(y);
  }
  if (c.max_window == 0 || c.max_window > c.length) {
    throw ArgumentError("run_convergence_chi: max_window must be in 1 .. L");
  }
  const std::vector<std::size_t> chis(distinct.begin(), distinct.end());
  // Ascending bond dimensions, each search starting from the previous result.
  std::vector<std::optional<MatrixProductState>> states(chis.size());
  for (std::size_t i = 0; i < chis.size(); ++i) {
    states[i] = ising_ground_state(c.h, c.length, chis[i], c.seed, c.budget,
                                   i == 0 ? std::nullopt : states[i - 1]);
  }
  auto state_for = [&](std::size_t chi) -> const MatrixProductState& {
    return *states[std::lower_bound(chis.begin(), chis.end(), chi) - chis.begin()];
  };
  std::vector<std::vector<WindowProfileRow>> profiles(c.chi_pairs.size());
  DisjointOptions dis;
  dis.seed = c.seed;
  parallel_for(c.chi_pairs.size(), [&](std::size_t i) {
    const auto& [x, y] = c.chi_pairs[i];
    profiles[i] = centered_window_profile(state_for(x), state_for(y), c.length / 2,
                                          c.max_window, true, dis);
  });
  ExperimentRecord rec;
  rec.experiment = "convergence-chi";
  rec.columns = {"window_size", "chi_a", "chi_b", "one_minus_F", "one_minus_Fd"};
  for (std::size_t i = 0; i < c.chi_pairs.size(); ++i) {
    for (const auto& row : profiles[i]) {
      rec.rows.push_back({as_int(row.x1 - row.x0), as_int(c.chi_pairs[i].first),
                          as_int(c.chi_pairs[i].second), 1.0 - row.uhlmann.value,
                          1.0 - row.disjoint.value});
    }
  }
  rec.set("h", str(c.h));
  rec.set("length", str(c.length));
  rec.set("seed", std::to_string(c.seed));
  rec.set("max_steps_per_stage", str(c.budget.max_steps));
  return rec;
}

ExperimentRecord run_convergence_ttn(const ConvergenceTtnConfig& c) {
  if (c.depth < 2) throw ArgumentError("run_convergence_ttn: depth must be >= 2");
  if (c.lag == 0) throw ArgumentError("run_convergence_ttn: lag must be positive");
  const std::size_t len = std::size_t{1} << c.depth;
  std::vector<std::size_t> sizes = c.window_sizes;
  if (sizes.empty()) {
    for (std::size_t t = 1; t < c.depth; ++t) sizes.push_back(std::size_t{1} << t);
  }
  std::map<std::size_t, std::vector<Branch>> by_size;
  for (std::size_t s : sizes) by_size[s];
  for (const Branch& br : branch_regions(c.depth)) {
    if (by_size.count(br.size())) by_size[br.size()].push_back(br);
  }
  for (const auto& [s, list] : by_size) {
    if (list.empty()) {
      throw ArgumentError("run_convergence_ttn: no branch of size " + std::to_string(s));
    }
  }

  ExperimentRecord rec;
  rec.experiment = "convergence-ttn";
  rec.columns = {"iteration", "window_size", "per_site_F"};
  std::vector<TreeTensorNetwork> ring;  // snapshots m - lag .. m
  TtnOptimizeOptions opts;
  opts.sweeps = c.sweeps;
  opts.observer = [&](const TtnSweep& sweep, const TreeTensorNetwork& net) {
    ring.push_back(net);
    if (ring.size() > c.lag + 1) ring.erase(ring.begin());
    if (sweep.sweep <= c.lag) return;
    const TreeTensorNetwork& now = ring.back();
    const TreeTensorNetwork& then = ring.front();
    for (const auto& [size, list] : by_size) {
      std::vector<double> per_site(list.size());
      parallel_for(list.size(), [&](std::size_t i) {
        const double f = branch_fidelity(now, then, list[i]).value;
        per_site[i] = std::pow(std::max(f, 0.0), 1.0 / static_cast<double>(size));
      });
      rec.rows.push_back({as_int(sweep.sweep), as_int(size),
                          *std::min_element(per_site.begin(), per_site.end())});
    }
  };
  const TtnOptimizeResult res = optimize_ground_state(
      random_ttn(c.depth, c.chi, 2, c.seed), ising_terms({c.h, len, true}), opts);
  rec.set("depth", str(c.depth));
  rec.set("chi", str(c.chi));
  rec.set("h", str(c.h));
  rec.set("sweeps", str(c.sweeps));
  rec.set("lag", str(c.lag));
  rec.set("seed", std::to_string(c.seed));
  rec.set("aggregate", "min over branches of each size");
  rec.set("final_energy", str(res.energies.back()));
  return rec;
}

std::optional<std::size_t> permanent_convergence(const ExperimentRecord& record,
                                                 std::size_t window_size, double threshold) {
  std::optional<std::size_t> candidate;
  for (std::size_t r = 0; r < record.rows.size(); ++r) {
    if (record.number(r, "window_size") != static_cast<double>(window_size)) continue;
    const auto m = static_cast<std::size_t>(record.number(r, "iteration"));
    if (1.0 - record.number(r, "per_site_F") < threshold) {
      if (!candidate) candidate = m;
    } else {
      candidate.reset();
    }
  }
  return candidate;
}

}  // namespace subfid
