#include "subfid/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>

#include "subfid/fidelity_mps.hpp"
#include "subfid/linalg.hpp"
#include "subfid/oracle.hpp"
#include "subfid/ttn.hpp"

namespace subfid {

namespace {

class Tracker {
 public:
  explicit Tracker(std::string name) { result_.name = std::move(name); }

  void check(double error, double tolerance) {
    ++result_.checks;
    if (!(error <= tolerance)) ++result_.failures;
    double ratio = INFINITY;
    if (std::isfinite(error)) ratio = tolerance > 0.0 ? error / tolerance : (error > 0.0 ? INFINITY : 0.0);
    if (result_.checks == 1 || ratio > ratio_) {
      ratio_ = ratio;
      result_.worst_error = error;
      result_.worst_tolerance = tolerance;
    }
  }
  // Passes when value <= bound + slack.
  void at_most(double value, double bound, double slack) {
    check(std::max(0.0, value - bound), slack);
  }

  SuiteResult finish(std::size_t trials) {
    result_.trials = trials;
    result_.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return result_;
  }

 private:
  SuiteResult result_;
  double ratio_ = 0.0;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Matrix unit_factor(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  Matrix x = linalg::random_gaussian(n, k, rng);
  return x / x.norm();
}

// Applies u to physical site `site` of a tree via its layer-1 tensor.
TreeTensorNetwork rotate_site(TreeTensorNetwork t, std::size_t site, const Matrix& u) {
  const Tensor& w = t.isometry(1, site / 2);
  const std::size_t top = w.extent(0), d = w.extent(1);
  Tensor out(w.shape());
  for (std::size_t a = 0; a < top; ++a)
    for (std::size_t l = 0; l < d; ++l)
      for (std::size_t r = 0; r < d; ++r) {
        cplx acc = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          acc += site % 2 == 0 ? u(l, k) * w({a, k, r}) : u(r, k) * w({a, l, k});
        }
        out({a, l, r}) = acc;
      }
  t.set_isometry(1, site / 2, std::move(out));
  return t;
}

}  // namespace

SuiteResult purify_suite(std::size_t trials, std::uint64_t seed) {
  Tracker tr("purify soundness");
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < trials; ++i) {
    const std::size_t n = 2 + i % 5, k = 1 + (i / 5) % 4, m = k + (i / 20) % 3;
    const Matrix x = unit_factor(n, k, rng);
    const Matrix w = linalg::random_isometry(k, m, rng);
    const Matrix phi = purify(Tensor::from_matrix(x), Tensor::from_matrix(w)).matrix();
    tr.check(max_abs(phi * phi.adjoint() - x * x.adjoint()), 1e-12);
  }
  return tr.finish(trials);
}

SuiteResult decompose_suite(std::size_t trials, std::uint64_t seed) {
  Tracker tr("purification_decompose round trip");
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < trials; ++i) {
    const std::size_t n = 2 + i % 5, k = 1 + (i / 5) % 4, m = k + (i / 20) % 3;
    Matrix x = unit_factor(n, k, rng);
    if (i % 4 == 3 && k > 1) {
      // Rank-deficient x.
      x = unit_factor(n, k - 1, rng) * linalg::random_isometry(k - 1, k, rng);
    }
    const Matrix phi = x * linalg::random_isometry(k, m, rng);
    const Matrix w =
        purification_decompose(Tensor::from_matrix(phi), Tensor::from_matrix(x)).matrix();
    tr.check(max_abs(x * w - phi), 1e-9);
    tr.check(max_abs(w * w.adjoint() - Matrix::Identity(k, k)), 1e-9);
  }
  return tr.finish(trials);
}

SuiteResult maximality_suite(std::size_t trials, std::uint64_t seed) {
  Tracker tr("optimal isometry maximality");
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < trials; ++i) {
    const std::size_t n = 1 + i % 6, m = 1 + (i / 6) % 6;
    const Matrix mat = unit_factor(n, m, rng);
    const linalg::Isometry opt = linalg::optimal_isometry(mat);
    const double attained = std::abs((opt.w * mat).trace());
    const double tn = linalg::trace_norm(mat);
    tr.check(std::abs(attained - tn), 1e-12);
    tr.check(linalg::isometry_residual(opt.w), 1e-12);
    for (int r = 0; r < 5; ++r) {
      const Matrix w = linalg::random_isometry(m, n, rng);
      tr.at_most(std::abs((w * mat).trace()), attained, 1e-12);
    }
  }
  return tr.finish(trials);
}

SuiteResult uhlmann_suite(std::size_t trials, std::uint64_t seed) {
  Tracker tr("uhlmann properties");
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < trials; ++i) {
    const std::size_t n = 2 + i % 5;
    const Matrix x = unit_factor(n, n, rng), y = unit_factor(n, 1 + i % n, rng);
    const Tensor rho = Tensor::from_matrix(x * x.adjoint());
    const Tensor sigma = Tensor::from_matrix(y * y.adjoint());
    const double f = uhlmann_exact(rho, sigma);
    tr.check(std::max(0.0, -f), 0.0);
    tr.at_most(f, 1.0, 1e-10);
    tr.check(std::abs(f - uhlmann_exact(sigma, rho)), 1e-10);
    tr.check(std::abs(uhlmann_exact(rho, rho) - 1.0), 1e-10);
    const Matrix u = linalg::random_unitary(n, rng);
    tr.check(std::abs(f - uhlmann_exact(Tensor::from_matrix(u * rho.matrix() * u.adjoint()),
                                        Tensor::from_matrix(u * sigma.matrix() * u.adjoint()))),
             1e-10);
    const Vector phi = linalg::random_gaussian(n, 1, rng).col(0).normalized();
    const double pure = uhlmann_exact(rho, Tensor::from_matrix(phi * phi.adjoint()));
    tr.check(std::abs(pure - std::sqrt(std::max(0.0, phi.dot(rho.matrix() * phi).real()))),
             1e-10);
    const UhlmannDetail det = uhlmann_detail(rho, sigma);
    tr.check(std::abs(det.via_eigenvalues - det.via_trace_norm), 1e-8);
  }
  return tr.finish(trials);
}

SuiteResult network_invariant_suite(std::size_t instances, std::uint64_t seed) {
  Tracker tr("network fidelity invariants");
  std::mt19937_64 rng(seed);
  constexpr std::size_t L = 8;
  constexpr double tol = 1e-10, tol_d = 1e-6;
  DisjointOptions dis;
  for (std::size_t i = 0; i < instances; ++i) {
    dis.seed = seed + i;
    if (i % 4 == 3) {
      // Tree branch fidelities.
      const std::size_t chi = 2 + i % 5;
      const auto a = random_ttn(3, chi, 2, rng());
      const auto b = random_ttn(3, chi, 2, rng());
      const std::size_t site = rng() % L;
      const Matrix u = linalg::random_unitary(2, rng);
      const auto ua = rotate_site(a, site, u), ub = rotate_site(b, site, u);
      const auto branches = branch_regions(a);
      std::vector<double> fs;
      for (const auto& br : branches) {
        const double f = branch_fidelity(a, b, br).value;
        fs.push_back(f);
        tr.check(std::max(0.0, -f), 0.0);
        tr.at_most(f, 1.0, tol);
        tr.check(std::abs(f - branch_fidelity(b, a, br).value), tol);
        tr.check(std::abs(branch_fidelity(a, a, br).value - 1.0), tol);
        tr.check(std::abs(f - branch_fidelity(ua, ub, br).value), tol);
        if (site < br.x0 || site >= br.x1) {
          tr.check(std::abs(f - branch_fidelity(ua, b, br).value), tol);
        }
      }
      // Parent branch (layer 2) contains children (layer 1).
      for (std::size_t k = 0; k < branches.size(); ++k) {
        if (branches[k].layer != 1) continue;
        for (std::size_t j = 0; j < branches.size(); ++j) {
          if (branches[j].layer == 2 && branches[j].x0 <= branches[k].x0 &&
              branches[k].x1 <= branches[j].x1) {
            tr.at_most(fs[j], fs[k], tol);
          }
        }
      }
      continue;
    }
    const std::size_t chi = 2 + i % 3;
    const auto a = random_mps(L, 2, chi, rng());
    const auto b = random_mps(L, 2, chi, rng());

    // Half-system: nested along the cut.
    const auto left = half_system_profile(a, b, Side::left);
    const auto right = half_system_profile(a, b, Side::right);
    const auto left_ba = half_system_profile(b, a, Side::left);
    for (std::size_t c = 0; c < left.size(); ++c) {
      for (double f : {left[c].value, right[c].value}) {
        tr.check(std::max(0.0, -f), 0.0);
        tr.at_most(f, 1.0, tol);
      }
      tr.check(std::abs(left[c].value - left_ba[c].value), tol);
      tr.check(std::abs(half_system_fidelity(a, a, c + 1, Side::left).value - 1.0), tol);
      if (c > 0) {
        tr.at_most(left[c].value, left[c - 1].value, tol);
        tr.at_most(right[c - 1].value, right[c].value, tol);
      }
    }

    // Windows: [x0, x1) inside [x0 - 1, x1 + 1).
    const std::size_t x0 = 1 + rng() % 4, x1 = x0 + 1 + rng() % 2;
    const double fw = window_fidelity(a, b, x0, x1).value;
    const double fw_big = window_fidelity(a, b, x0 - 1, x1 + 1).value;
    const double fd = disjoint_window_fidelity(a, b, x0, x1, dis).value;
    const double fd_big = disjoint_window_fidelity(a, b, x0 - 1, x1 + 1, dis).value;
    for (double f : {fw, fw_big, fd, fd_big}) {
      tr.check(std::max(0.0, -f), 0.0);
      tr.at_most(f, 1.0, tol);
    }
    tr.check(std::abs(fw - window_fidelity(b, a, x0, x1).value), tol);
    tr.check(std::abs(fd - disjoint_window_fidelity(b, a, x0, x1, dis).value), tol_d);
    tr.check(std::abs(window_fidelity(a, a, x0, x1).value - 1.0), tol);
    tr.check(std::abs(disjoint_window_fidelity(a, a, x0, x1, dis).value - 1.0), tol_d);
    tr.at_most(fw_big, fw, tol);
    tr.at_most(fd_big, fd, tol_d);
    tr.at_most(fd, fw, 1e-8);
    tr.at_most(fd_big, fw_big, 1e-8);

    // Local unitaries: the same unitary on both states at any site, or on
    // one state outside the region.
    const Matrix u = linalg::random_unitary(2, rng);
    const std::size_t inside = x0 + rng() % (x1 - x0);
    auto ua = a, ub = b;
    ua.apply_local(u, inside);
    ub.apply_local(u, inside);
    tr.check(std::abs(fw - window_fidelity(ua, ub, x0, x1).value), tol);
    tr.check(std::abs(fd - disjoint_window_fidelity(ua, ub, x0, x1, dis).value), tol_d);
    tr.check(std::abs(left[x1 - 1].value -
                      half_system_fidelity(ua, ub, x1, Side::left).value), tol);
    auto outside = a;
    outside.apply_local(u, L - 1);
    tr.check(std::abs(fw - window_fidelity(outside, b, x0, x1).value), tol);
    tr.check(std::abs(fd - disjoint_window_fidelity(outside, b, x0, x1, dis).value), tol_d);
    tr.check(std::abs(left[x1 - 1].value -
                      half_system_fidelity(outside, b, x1, Side::left).value), tol);
  }
  return tr.finish(instances);
}

std::vector<SuiteResult> run_selftest(std::size_t trials, std::uint64_t seed) {
  return {purify_suite(trials, seed), decompose_suite(trials, seed + 1),
          maximality_suite(trials, seed + 2), uhlmann_suite(trials, seed + 3),
          network_invariant_suite(std::max<std::size_t>(1, trials / 5), seed + 4)};
}

}  // namespace subfid
