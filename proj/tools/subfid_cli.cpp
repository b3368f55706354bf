#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "subfid/container.hpp"
#include "subfid/errors.hpp"
#include "subfid/experiments.hpp"
#include "subfid/fidelity_mps.hpp"
#include "subfid/selftest.hpp"
#include "subfid/ttn.hpp"

using namespace subfid;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, sep);) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::size_t parse_size(const std::string& s) {
  if (s.empty() || s[0] < '0' || s[0] > '9') throw ArgumentError("not an integer: '" + s + "'");
  std::size_t pos = 0;
  const unsigned long long v = std::stoull(s, &pos);
  if (pos != s.size()) throw ArgumentError("not an integer: '" + s + "'");
  return static_cast<std::size_t>(v);
}

std::size_t checked_size(const std::string& s) {
  try {
    return parse_size(s);
  } catch (const std::logic_error&) {
    throw ArgumentError("not an integer: '" + s + "'");
  }
}

std::pair<std::size_t, std::size_t> parse_pair(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() != 2) throw ArgumentError("expected a:b, got '" + s + "'");
  return {checked_size(parts[0]), checked_size(parts[1])};
}

Matrix parse_op(const std::string& name) {
  if (name == "z") return pauli_z();
  if (name == "x") return pauli_x();
  if (name == "y") return pauli_y();
  throw ArgumentError("unknown operator '" + name + "' (expected x, y or z)");
}

void emit(const std::string& out, const ExperimentRecord& rec) {
  if (out.empty() || out == "-") {
    write_csv(std::cout, rec);
  } else {
    write_record(out, rec);
    std::cerr << "wrote " << rec.rows.size() << " rows to " << out << "\n";
  }
  for (const auto& w : rec.warnings) std::cerr << "warning: " << w << "\n";
}

GroundStateBudget budget_from(std::size_t max_steps) {
  GroundStateBudget b;
  b.max_steps = max_steps;
  return b;
}

struct Common {
  std::uint64_t seed = 0;
  std::size_t max_steps = 2000;
};

void cmd_gs(double h, std::size_t length, std::size_t chi, const std::string& out,
            const Common& c) {
  GroundStateOptions opts = default_ground_state_options(chi, c.max_steps);
  opts.seed = c.seed;
  const BondHamiltonian ham = ising_terms({h, length, true});
  const GroundStateSearch gs = tebd_ground_state(ham, opts);
  save_network(out, gs.state);
  std::printf("energy %.12f\nenergy_per_site %.12f\nfree_fermion_energy %.12f\n", gs.energy,
              gs.energy / static_cast<double>(length),
              ising_free_fermion_energy({h, length, true}));
  std::printf("steps %zu\nconverged %s\nmax_bond_dim %zu\n", gs.steps,
              gs.converged ? "true" : "false", gs.state.max_bond_dim());
}

void cmd_quench(const std::string& ground_dir, double h, const std::string& op,
                std::size_t site, bool site_set, double t_max, double dt, std::size_t chi,
                const std::string& probes, double every, const std::string& out) {
  const MatrixProductState ground = load_mps(ground_dir);
  const std::size_t len = ground.length();
  QuenchConfig cfg;
  cfg.op = parse_op(op);
  cfg.site = site_set ? site : len / 2;
  cfg.evolution.dt = dt;
  cfg.evolution.truncation = TruncationSpec::rank(chi);
  if (!(t_max >= 0.0) || !(dt > 0.0) || !(every > 0.0)) {
    throw ArgumentError("t-max must be >= 0, dt and sample-every > 0");
  }
  const double stride = std::max(1.0, std::round(every / dt)) * dt;
  for (double t = 0.0; t < t_max - 1e-9; t += stride) {
    cfg.times.push_back(std::round(t / dt) * dt);
  }
  cfg.times.push_back(std::round(t_max / dt) * dt);
  std::vector<ProbeKind> kinds;
  for (const auto& k : split(probes, ',')) kinds.push_back(parse_probe_kind(k));
  cfg.probes = all_probes(len, kinds);
  ExperimentRecord rec = run_quench(ground, ising_terms({h, len, true}), cfg);
  rec.set("op", op);
  rec.set("h", format_number(h));
  rec.set("ground_state", ground_dir);
  emit(out, rec);
}

void cmd_fidelity(const std::string& pa, const std::string& pb, const std::string& kind,
                  std::size_t cut, bool cut_set, const std::string& side,
                  const std::string& window, const std::string& out, const Common& c,
                  std::size_t restarts) {
  const Network a = load_network(pa), b = load_network(pb);
  if (a.index() != b.index()) throw ArgumentError("states must both be MPS or both TTN");
  std::size_t x0 = 0, x1 = 0;
  if (kind == "half") {
    if (!cut_set) throw ArgumentError("--kind half needs --cut");
    if (side != "left" && side != "right") throw ArgumentError("--side must be left or right");
  } else if (kind == "window" || kind == "disjoint") {
    if (window.empty()) throw ArgumentError("--kind " + kind + " needs --window x0:x1");
    std::tie(x0, x1) = parse_pair(window);
  } else {
    throw ArgumentError("--kind must be half, window or disjoint");
  }
  FidelityReport rep;
  if (const auto* ma = std::get_if<MatrixProductState>(&a)) {
    const auto& mb = std::get<MatrixProductState>(b);
    if (kind == "half") {
      rep = half_system_fidelity(*ma, mb, cut, side == "left" ? Side::left : Side::right);
      x0 = side == "left" ? 0 : cut;
      x1 = side == "left" ? cut : ma->length();
    } else if (kind == "window") {
      rep = window_fidelity(*ma, mb, x0, x1);
    } else {
      DisjointOptions opts;
      opts.seed = c.seed;
      opts.restarts = restarts;
      rep = disjoint_window_fidelity(*ma, mb, x0, x1, opts);
    }
  } else {
    const auto& ta = std::get<TreeTensorNetwork>(a);
    const auto& tb = std::get<TreeTensorNetwork>(b);
    if (kind == "disjoint") throw ArgumentError("disjoint fidelity needs MPS inputs");
    if (kind == "half") {
      x0 = side == "left" ? 0 : cut;
      x1 = side == "left" ? cut : ta.length();
    }
    const auto branches = branch_regions(ta);
    const auto it = std::find_if(branches.begin(), branches.end(),
                                 [&](const Branch& br) { return br.x0 == x0 && br.x1 == x1; });
    if (it == branches.end()) {
      throw ArgumentError("region is not a branch of the tree");
    }
    rep = branch_fidelity(ta, tb, *it);
  }
  ExperimentRecord rec;
  rec.experiment = "fidelity";
  rec.columns = {"kind", "x0", "x1", "fidelity", "method", "iterations", "converged"};
  rec.rows.push_back({kind, std::int64_t(x0), std::int64_t(x1), rep.value,
                      to_string(rep.method), std::int64_t(rep.iterations),
                      std::int64_t(rep.converged ? 1 : 0)});
  rec.set("state_a", pa);
  rec.set("state_b", pb);
  rec.set("seed", std::to_string(c.seed));
  emit(out, rec);
}

int cmd_selftest(std::size_t trials, std::uint64_t seed) {
  bool ok = true;
  for (const auto& s : run_selftest(trials, seed)) {
    std::printf("%-36s %s  trials %zu  checks %zu  worst %.3e (tol %.0e)  %.2fs\n",
                s.name.c_str(), s.passed() ? "PASS" : "FAIL", s.trials, s.checks,
                s.worst_error, s.worst_tolerance, s.seconds);
    ok = ok && s.passed();
  }
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uhlmann fidelities between subsystems of tensor-network states"};
  app.footer("Environment: SUBFID_THREADS sets the worker thread count.\n"
             "Exit codes: 0 success, 1 invalid input, 2 numerical failure.");
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub, bool steps) {
    sub->add_option("--seed", common.seed, "Random seed")->capture_default_str();
    if (steps) {
      sub->add_option("--max-steps", common.max_steps,
                      "Step cap per imaginary-time stage")
          ->capture_default_str();
    }
  };

  double h = 1.0, h2 = 1.05, t_max = 10.0, dt = 0.05, every = 1.0, threshold = 1e-4;
  std::size_t length = 0, chi = 32, site = 0, cut = 0, max_window = 64, depth = 6,
              sweeps = 200, lag = 10, trials = 1000, restarts = 3;
  std::string out, ground, op = "z", probes = "two_site,left_half,right_half", state_a,
                   state_b, kind, side = "left", window, chi_pairs = "10:20", sizes;

  auto* gs = app.add_subcommand("gs", "Ising ground state by imaginary-time TEBD");
  gs->add_option("--h-field", h, "Transverse field")->capture_default_str();
  gs->add_option("--length", length, "Chain length")->required();
  gs->add_option("--chi", chi, "Bond dimension")->capture_default_str();
  gs->add_option("--out", out, "Output container directory")->required();
  add_common(gs, true);

  auto* qu = app.add_subcommand("quench", "Local quench exp(+iHt) O|E0> with fidelity probes");
  qu->add_option("--ground-state", ground, "Ground-state container")->required();
  qu->add_option("--h-field", h, "Transverse field of the evolving Hamiltonian")
      ->capture_default_str();
  qu->add_option("--op", op, "Perturbation: x, y or z")->capture_default_str();
  auto* site_opt = qu->add_option("--site", site, "Insertion site (default L/2)");
  qu->add_option("--t-max", t_max, "Final time")->capture_default_str();
  qu->add_option("--dt", dt, "Time step")->capture_default_str();
  qu->add_option("--chi", chi, "Bond dimension cap")->default_val(50);
  qu->add_option("--probes", probes, "Comma-separated probe kinds")->capture_default_str();
  qu->add_option("--sample-every", every, "Sampling interval in time")->capture_default_str();
  qu->add_option("--out", out, "CSV output (stdout if omitted)");
  add_common(qu, false);

  auto* fi = app.add_subcommand("fidelity", "Fidelity between two stored states");
  fi->add_option("--state-a", state_a, "First container")->required();
  fi->add_option("--state-b", state_b, "Second container")->required();
  fi->add_option("--kind", kind, "half, window or disjoint")->required();
  auto* cut_opt = fi->add_option("--cut", cut, "Cut position for --kind half");
  fi->add_option("--side", side, "left or right, for --kind half")->capture_default_str();
  fi->add_option("--window", window, "Window x0:x1 (half-open)");
  fi->add_option("--restarts", restarts, "Disjoint restarts")->capture_default_str();
  fi->add_option("--out", out, "CSV output (stdout if omitted)");
  add_common(fi, false);

  auto* co = app.add_subcommand("compare", "Window fidelities between two ground states");
  co->add_option("--h1", h, "First field")->capture_default_str();
  co->add_option("--h2", h2, "Second field")->capture_default_str();
  co->add_option("--length", length, "Chain length")->default_val(256);
  co->add_option("--chi", chi, "Bond dimension")->default_val(50);
  co->add_option("--max-window", max_window, "Largest window")->capture_default_str();
  co->add_option("--out", out, "CSV output (stdout if omitted)");
  add_common(co, true);

  auto* cc = app.add_subcommand("converge-chi", "Fidelity between bond dimensions");
  cc->add_option("--h-field", h, "Transverse field")->capture_default_str();
  cc->add_option("--length", length, "Chain length")->default_val(256);
  cc->add_option("--chi-pairs", chi_pairs, "Comma-separated a:b pairs")->capture_default_str();
  cc->add_option("--max-window", max_window, "Largest window")->capture_default_str();
  cc->add_option("--out", out, "CSV output (stdout if omitted)");
  add_common(cc, true);

  auto* ct = app.add_subcommand("converge-ttn", "Lagged branch fidelities during optimization");
  ct->add_option("--depth", depth, "Tree depth (L = 2^depth)")->capture_default_str();
  ct->add_option("--chi", chi, "Bond dimension")->default_val(12);
  ct->add_option("--h-field", h, "Transverse field")->capture_default_str();
  ct->add_option("--sweeps", sweeps, "Optimization sweeps")->capture_default_str();
  ct->add_option("--lag", lag, "Snapshot lag")->capture_default_str();
  ct->add_option("--sizes", sizes, "Comma-separated branch sizes (default all)");
  ct->add_option("--threshold", threshold, "Deficit threshold for the summary")
      ->capture_default_str();
  ct->add_option("--out", out, "CSV output (stdout if omitted)");
  add_common(ct, false);

  auto* st = app.add_subcommand("selftest", "Oracle property suites");
  st->add_option("--trials", trials, "Trials per suite")->capture_default_str();
  add_common(st, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*gs) {
      cmd_gs(h, length, chi, out, common);
    } else if (*qu) {
      cmd_quench(ground, h, op, site, site_opt->count() > 0, t_max, dt, chi, probes, every, out);
    } else if (*fi) {
      cmd_fidelity(state_a, state_b, kind, cut, cut_opt->count() > 0, side, window, out, common,
                   restarts);
    } else if (*co) {
      ScaleCompareConfig cfg;
      cfg.h1 = h;
      cfg.h2 = h2;
      cfg.length = length;
      cfg.chi = chi;
      cfg.max_window = max_window;
      cfg.seed = common.seed;
      cfg.budget = budget_from(common.max_steps);
      emit(out, run_scale_compare(cfg));
    } else if (*cc) {
      ConvergenceChiConfig cfg;
      cfg.h = h;
      cfg.length = length;
      cfg.chi_pairs.clear();
      for (const auto& p : split(chi_pairs, ',')) cfg.chi_pairs.push_back(parse_pair(p));
      cfg.max_window = max_window;
      cfg.seed = common.seed;
      cfg.budget = budget_from(common.max_steps);
      emit(out, run_convergence_chi(cfg));
    } else if (*ct) {
      ConvergenceTtnConfig cfg;
      cfg.depth = depth;
      cfg.chi = chi;
      cfg.h = h;
      cfg.sweeps = sweeps;
      cfg.lag = lag;
      for (const auto& s : split(sizes, ',')) cfg.window_sizes.push_back(checked_size(s));
      cfg.seed = common.seed;
      const ExperimentRecord rec = run_convergence_ttn(cfg);
      emit(out, rec);
      std::vector<std::size_t> shown = cfg.window_sizes;
      if (shown.empty()) {
        for (std::size_t t = 1; t < depth; ++t) shown.push_back(std::size_t{1} << t);
      }
      for (std::size_t s : shown) {
        const auto m = permanent_convergence(rec, s, threshold);
        std::cerr << "size " << s << ": converged from iteration "
                  << (m ? std::to_string(*m) : std::string("never")) << "\n";
      }
    } else if (*st) {
      return cmd_selftest(trials, common.seed);
    }
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
