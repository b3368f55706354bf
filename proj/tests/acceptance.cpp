// Acceptance run: one PASS/FAIL line per criterion. With no arguments all
// criteria run; otherwise only the listed numbers.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "subfid/container.hpp"
#include "subfid/errors.hpp"
#include "subfid/experiments.hpp"
#include "subfid/fidelity_mps.hpp"
#include "subfid/hamiltonian.hpp"
#include "subfid/oracle.hpp"
#include "subfid/selftest.hpp"
#include "subfid/tebd.hpp"
#include "subfid/ttn.hpp"

using namespace subfid;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Tensor region(const Tensor& vec, std::size_t len, std::size_t x0, std::size_t x1) {
  return reduced_density_matrix(vec, len, x0, x1).matrix;
}

// 1. MPS fidelities against the statevector oracle.
Outcome oracle_mps() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr std::size_t L = 10;
  const std::vector<std::pair<std::size_t, std::size_t>> windows{
      {0, 2}, {2, 5}, {3, 7}, {1, 9}, {5, 10}};
  const std::vector<std::pair<std::size_t, std::size_t>> disjoint{{2, 4}, {4, 7}, {3, 6}};
  double worst = 0.0, worst_d = 0.0;
  for (std::size_t i = 0; i < 50; ++i) {
    const std::size_t chi = 2 + 2 * (i % 3);
    const auto a = random_mps(L, 2, chi, 1000 + 2 * i);
    const auto b = random_mps(L, 2, chi, 1001 + 2 * i);
    const Tensor va = mps_to_statevector(a), vb = mps_to_statevector(b);
    for (std::size_t cut = 1; cut < L; ++cut) {
      const double fl = half_system_fidelity(a, b, cut, Side::left).value;
      const double fr = half_system_fidelity(a, b, cut, Side::right).value;
      worst = std::max(worst, std::abs(fl - uhlmann_exact(region(va, L, 0, cut), region(vb, L, 0, cut))));
      worst = std::max(worst, std::abs(fr - uhlmann_exact(region(va, L, cut, L), region(vb, L, cut, L))));
    }
    for (const auto& [x0, x1] : windows) {
      const double f = window_fidelity(a, b, x0, x1).value;
      worst = std::max(worst, std::abs(f - uhlmann_exact(region(va, L, x0, x1), region(vb, L, x0, x1))));
    }
    for (const auto& [x0, x1] : disjoint) {
      DisjointOptions opts;
      opts.seed = i;
      const double f = disjoint_window_fidelity(a, b, x0, x1, opts).value;
      RestrictedOptions ro;
      ro.seed = i;
      const double ref = restricted_fidelity(va, vb, L, x0, x1, RestrictionMode::disjoint, ro).value;
      worst_d = std::max(worst_d, std::abs(f - ref));
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-8 && worst_d <= 1e-6 && secs <= 120.0,
          "max error " + fmt("%.2e", worst) + " (tol 1e-8), disjoint " + fmt("%.2e", worst_d) +
              " (tol 1e-6), " + fmt("%.1f", secs) + " s (limit 120 s)"};
}

// 2. TTN branch fidelities against the oracle.
Outcome oracle_ttn() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::size_t branches = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    const std::size_t depth = 3 + i % 2, chi = 2 + i % 5;
    const auto a = random_ttn(depth, chi, 2, 2000 + 2 * i);
    const auto b = random_ttn(depth, chi, 2, 2001 + 2 * i);
    const Tensor va = ttn_to_statevector(a), vb = ttn_to_statevector(b);
    for (const auto& br : branch_regions(a)) {
      const double f = branch_fidelity(a, b, br).value;
      const double ref = uhlmann_exact(region(va, a.length(), br.x0, br.x1),
                                       region(vb, a.length(), br.x0, br.x1));
      worst = std::max(worst, std::abs(f - ref));
      ++branches;
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-8 && secs <= 60.0,
          std::to_string(branches) + " branches, max error " + fmt("%.2e", worst) +
              " (tol 1e-8), " + fmt("%.1f", secs) + " s (limit 60 s)"};
}

// 3. Purification and isometry suites.
Outcome purification_suites() {
  const auto t0 = std::chrono::steady_clock::now();
  const SuiteResult suites[] = {purify_suite(1000, 31), decompose_suite(1000, 32),
                                maximality_suite(1000, 33)};
  bool ok = true;
  std::string detail;
  for (const auto& s : suites) {
    ok = ok && s.passed();
    detail += s.name + " " + fmt("%.1e", s.worst_error) + "/" + fmt("%.0e", s.worst_tolerance) +
              (s.passed() ? "" : " FAILED") + "; ";
  }
  const double secs = seconds_since(t0);
  return {ok && secs <= 60.0, detail + fmt("%.1f", secs) + " s (limit 60 s)"};
}

// 4. Ground-state energies against exact diagonalization.
Outcome ground_energies() {
  const BondHamiltonian h12 = ising_terms({1.0, 12, true});
  const double exact12 = exact_ground_state(h12).energy;
  GroundStateOptions opts = default_ground_state_options(32);
  opts.seed = 41;
  const double tebd = tebd_ground_state(h12, opts).energy;

  const BondHamiltonian h8 = ising_terms({1.0, 8, true});
  const double exact8 = exact_ground_state(h8).energy;
  TtnOptimizeOptions topts;
  topts.sweeps = 200;
  const auto res = optimize_ground_state(random_ttn(3, 16, 2, 42), h8, topts);
  const double lowest = *std::min_element(res.energies.begin(), res.energies.end());
  const double tree_err = std::abs(res.energies.back() - exact8);
  const bool ok = std::abs(tebd - exact12) <= 1e-6 && tree_err <= 1e-8 && lowest >= exact8 - 1e-9;
  return {ok, "TEBD L=12 error " + fmt("%.2e", tebd - exact12) + " (tol 1e-6); TTN depth 3 error " +
                  fmt("%.2e", res.energies.back() - exact8) + " (tol 1e-8), lowest - exact " +
                  fmt("%.2e", lowest - exact8) + " (>= -1e-9)"};
}

// 5. Quench shape on L = 128.
Outcome quench_shape() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr std::size_t L = 128, x_op = 64;
  const BondHamiltonian h = ising_terms({1.0, L, true});
  GroundStateOptions gopts;
  gopts.stages = {{0.1, 16, 3000}, {0.1, 50, 300}, {0.01, 50, 200}, {0.001, 50, 100}};
  gopts.seed = 51;
  const auto gs = tebd_ground_state(h, gopts);
  const double gs_secs = seconds_since(t0);

  QuenchConfig cfg;
  cfg.site = x_op;
  cfg.times = {5.0, 10.0};
  cfg.probes = all_probes(L, {ProbeKind::two_site, ProbeKind::left_half});
  const ExperimentRecord rec = run_quench(gs.state, h, cfg);

  bool ok = true;
  std::string detail;
  for (double t : cfg.times) {
    double fmin = 2.0, prev = 2.0, monotone_gap = 0.0, far_left = 0.0, far_right = 0.0;
    std::size_t argmin = 0;
    for (std::size_t r = 0; r < rec.rows.size(); ++r) {
      if (rec.number(r, "t") != t) continue;
      const auto x = static_cast<std::size_t>(rec.number(r, "x"));
      const double f = rec.number(r, "fidelity");
      if (rec.text(r, "probe") == "two_site") {
        if (f < fmin) {
          fmin = f;
          argmin = x;
        }
      } else {
        if (x == 1) far_left = f;
        if (x == L - 1) far_right = f;
        monotone_gap = std::max(monotone_gap, f - prev);
        prev = f;
      }
    }
    const double overlap = std::stod(*rec.parameter("overlap@" + format_number(t)));
    const double dist = std::abs(static_cast<double>(argmin) - static_cast<double>(x_op));
    const bool a = dist >= t - 3.0 && dist <= t + 3.0;
    const bool b = monotone_gap <= 1e-6 && std::abs(far_left - 1.0) <= 1e-6;
    const bool c = std::abs(far_right - overlap) <= 1e-6;
    ok = ok && a && b && c;
    detail += "t=" + fmt("%g", t) + ": min at |x-x_op|=" + fmt("%g", dist) + (a ? "" : " FAILED") +
              ", rise " + fmt("%.1e", monotone_gap) + ", 1-F(far left) " +
              fmt("%.1e", 1.0 - far_left) + (b ? "" : " FAILED") + ", |F(far right)-overlap| " +
              fmt("%.1e", std::abs(far_right - overlap)) + (c ? "" : " FAILED") + "; ";
  }
  const double secs = seconds_since(t0);
  ok = ok && secs <= 1800.0;
  return {ok, detail + "ground state " + fmt("%.0f", gs_secs) + " s, total " + fmt("%.0f", secs) +
                  " s (limit 1800 s)" + (rec.warnings.empty() ? "" : ", warnings: " + rec.warnings[0])};
}

// 6. Structural invariants of all fidelity kinds.
Outcome invariants() {
  const SuiteResult s = network_invariant_suite(200, 61);
  return {s.passed(), std::to_string(s.trials) + " instances, " + std::to_string(s.checks) +
                          " checks, " + std::to_string(s.failures) + " failures, worst " +
                          fmt("%.1e", s.worst_error) + " (tol " + fmt("%.0e", s.worst_tolerance) + ")"};
}

// 7. Bond-dimension convergence separates critical and gapped chains.
Outcome convergence_separation() {
  std::map<double, ExperimentRecord> recs;
  for (double h : {1.0, 1.05}) {
    ConvergenceChiConfig cfg;
    cfg.h = h;
    cfg.length = 256;
    cfg.chi_pairs = {{10, 20}};
    cfg.max_window = 64;
    cfg.seed = 71;
    cfg.budget.max_steps = 3000;
    recs.emplace(h, run_convergence_chi(cfg));
  }
  const auto& crit = recs.at(1.0);
  const auto& gapped = recs.at(1.05);
  bool separated = true, ordered = true;
  double worst_ratio = 0.0;
  for (std::size_t r = 0; r < crit.rows.size(); ++r) {
    for (const auto* rec : {&crit, &gapped}) {
      if (rec->number(r, "one_minus_Fd") < rec->number(r, "one_minus_F") - 1e-10) ordered = false;
    }
    if (crit.number(r, "window_size") < 10) continue;
    const double dc = crit.number(r, "one_minus_F"), dg = gapped.number(r, "one_minus_F");
    if (!(dg < dc)) separated = false;
    worst_ratio = std::max(worst_ratio, dg / dc);
  }
  const std::size_t last = crit.rows.size() - 1;
  return {separated && ordered,
          std::string("deficit(h=1.05) < deficit(h=1.0) for |M| >= 10: ") +
              (separated ? "yes" : "NO") + " (max ratio " + fmt("%.3f", worst_ratio) +
              "), F_d <= F: " + (ordered ? "yes" : "NO") + "; at |M|=64: " +
              fmt("%.2e", crit.number(last, "one_minus_F")) + " vs " +
              fmt("%.2e", gapped.number(last, "one_minus_F"))};
}

// 8. Lower tree layers converge first.
Outcome layer_ordering() {
  ConvergenceTtnConfig cfg;
  cfg.depth = 6;
  cfg.chi = 12;
  cfg.h = 1.0;
  cfg.sweeps = 300;
  cfg.lag = 10;
  cfg.window_sizes = {2, 32};
  cfg.seed = 81;
  const ExperimentRecord rec = run_convergence_ttn(cfg);
  const auto m2 = permanent_convergence(rec, 2, 1e-4);
  const auto m32 = permanent_convergence(rec, 32, 1e-4);
  const bool ok = m2 && m32 && *m2 <= *m32;
  auto show = [](const std::optional<std::size_t>& m) {
    return m ? std::to_string(*m) : std::string("never");
  };
  return {ok, "m*(2) = " + show(m2) + ", m*(32) = " + show(m32) + " over " +
                  std::to_string(cfg.sweeps) + " sweeps"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

bool same_files(const fs::path& a, const fs::path& b) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++n;
    if (slurp(e.path()) != slurp(b / e.path().filename())) return false;
  }
  return n == static_cast<std::size_t>(std::distance(fs::directory_iterator(b), {}));
}

// 9. Container round trips.
Outcome round_trips() {
  const fs::path root = fs::temp_directory_path() / ("subfid_accept_" + std::to_string(::getpid()));
  std::size_t exact = 0, identical_files = 0, identical_fidelity = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    const fs::path d1 = root / ("a" + std::to_string(i)), d2 = root / ("b" + std::to_string(i));
    if (i % 2 == 0) {
      const auto s = random_mps(6 + i % 7, 2 + i % 3, 1 + i % 6, 900 + i);
      const auto other = random_mps(s.length(), s.phys_dim(), 3, 950 + i);
      save_network(d1, s);
      const auto back = load_mps(d1);
      save_network(d2, back);
      exact += back == s;
      identical_files += same_files(d1, d2);
      const std::size_t mid = s.length() / 2;
      identical_fidelity +=
          window_fidelity(s, other, mid - 1, mid + 1).value ==
              window_fidelity(back, other, mid - 1, mid + 1).value &&
          half_system_fidelity(s, other, mid, Side::left).value ==
              half_system_fidelity(back, other, mid, Side::left).value;
    } else {
      const auto t = random_ttn(2 + i % 3, 1 + i % 6, 2, 900 + i);
      const auto other = random_ttn(t.depth(), 1 + i % 6, 2, 950 + i);
      save_network(d1, t);
      const auto back = load_ttn(d1);
      save_network(d2, back);
      exact += back == t;
      identical_files += same_files(d1, d2);
      bool same = true;
      for (const auto& br : branch_regions(t)) {
        same = same && branch_fidelity(t, other, br).value == branch_fidelity(back, other, br).value;
      }
      identical_fidelity += same;
    }
  }
  fs::remove_all(root);
  return {exact == 100 && identical_files == 100 && identical_fidelity == 100,
          std::to_string(exact) + "/100 bit-exact loads, " + std::to_string(identical_files) +
              "/100 byte-identical re-saves, " + std::to_string(identical_fidelity) +
              "/100 identical fidelities"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"MPS fidelities match the oracle", oracle_mps},
      {"TTN branch fidelities match the oracle", oracle_ttn},
      {"purification and isometry suites", purification_suites},
      {"ground-state energies", ground_energies},
      {"local quench shape", quench_shape},
      {"fidelity invariants", invariants},
      {"bond-dimension convergence separation", convergence_separation},
      {"tree layer ordering", layer_ordering},
      {"container round trips", round_trips},
  };
  std::vector<std::size_t> selected;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
      return 1;
    }
    selected.push_back(static_cast<std::size_t>(n));
  }
  if (selected.empty()) {
    for (std::size_t n = 1; n <= criteria.size(); ++n) selected.push_back(n);
  }
  bool all = true;
  for (std::size_t n : selected) {
    const auto& [name, run] = criteria[n - 1];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %zu: %s  %s -- %s [%.1f s]\n", n, o.pass ? "PASS" : "FAIL", name.c_str(),
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
